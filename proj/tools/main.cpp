#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"gaussinv: Bayes factors, counting partitions and flat-prior grid posteriors"};
    app.require_subcommand(1);

    gaussinv::RunConfig config;

    auto* odds = app.add_subcommand("odds", "Posterior odds of two causes after a sequence of events");
    odds->add_option("--system", config.system_path, "Causal system JSON")->required()->check(CLI::ExistingFile);
    odds->add_option("--events", config.events, "Observed events, in order")->required()->delimiter(',');
    odds->add_option("--pair", config.pair, "Causes i,j (indices or labels) for the odds")->capture_default_str();
    odds->add_option("--out", config.out_path, "Report path (default: stdout)");

    auto* partition = app.add_subcommand("partition", "Check the odds theorem on an exact case partition");
    partition->add_option("--counts", config.counts_path, "Partition JSON")->required()->check(CLI::ExistingFile);
    partition->add_option("--out", config.out_path, "Report path (default: stdout)");

    auto* fit = app.add_subcommand("fit", "Flat-prior grid posterior of a model given observations");
    fit->add_option("--model", config.model_path, "Model spec JSON")->required()->check(CLI::ExistingFile);
    fit->add_option("--data", config.data_path, "Observation CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--dump-grid", config.grid_dump_path, "Write every grid node to this CSV");
    fit->add_option("--out", config.out_path, "Summary path (default: stdout)");
    fit->add_option("--threads", config.threads, "OpenMP threads (0: default)")->check(CLI::NonNegativeNumber);

    auto* sharper = app.add_subcommand("sharper", "Binomial Bayes factor for a suspected card sharper");
    sharper->add_option("--deals", config.deals, "Number of deals")->capture_default_str();
    sharper->add_option("--successes", config.successes, "Deals on which the king was turned up")->capture_default_str();
    sharper->add_option("--p-fair", config.p_fair, "Per-deal probability for a fair dealer")->required();
    sharper->add_option("--p-sharp", config.p_sharp, "Per-deal probability for a sharper")->required();
    sharper->add_option("--prior-odds", config.prior_odds, "Prior odds sharper:fair")->capture_default_str();
    sharper->add_option("--out", config.out_path, "Report path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    if (odds->parsed()) config.subcommand = gaussinv::Subcommand::Odds;
    else if (partition->parsed()) config.subcommand = gaussinv::Subcommand::Partition;
    else if (fit->parsed()) config.subcommand = gaussinv::Subcommand::Fit;
    else config.subcommand = gaussinv::Subcommand::Sharper;

    return gaussinv::run(config, std::cout, std::cerr);
}
