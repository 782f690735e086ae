#include "commands.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gauss/error.hpp"
#include "gauss/grid_kernels.hpp"
#include "gauss/hypothesis.hpp"
#include "gauss/partition.hpp"
#include "gauss/posterior.hpp"

namespace gaussinv {

using gauss::Error;
using gauss::ErrorKind;
using nlohmann::json;

namespace {

// Agreement required between the single-shot and per-deal Bayes factors.
constexpr double kChainTolerance = 1e-12;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseFailure, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseFailure, "'" + path + "': " + e.what());
    }
}

// Writes the whole report or nothing.
int emit(const json& report, const RunConfig& config, std::ostream& out, std::ostream& err) {
    const std::string text = report.dump(2) + "\n";
    if (config.out_path.empty()) {
        out << text;
        out.flush();
        return out ? kExitOk : kExitFailure;
    }
    std::ofstream file(config.out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
        err << "error: cannot write '" << config.out_path << "'\n";
        return kExitFailure;
    }
    file << text;
    file.close();
    if (!file) {
        err << "error: failed writing '" << config.out_path << "'\n";
        return kExitFailure;
    }
    return kExitOk;
}

std::size_t parse_cause(const std::string& token, const gauss::CausalSystem& system) {
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
    if (ec == std::errc() && ptr == token.data() + token.size()) {
        if (idx >= system.size())
            throw Error(ErrorKind::InvalidArgument, "cause index " + token + " out of range");
        return idx;
    }
    return system.index_of(token);
}

json rational_json(const gauss::Rational& r) {
    const auto to_json_int = [](const gauss::Integer& v) -> json {
        if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max()) return v.convert_to<std::uint64_t>();
        return v.str();
    };
    return {{"numerator", to_json_int(numerator(r))}, {"denominator", to_json_int(denominator(r))}};
}

json extended_json(const gauss::ExtendedRational& r) {
    if (r.infinite) return {{"numerator", 1}, {"denominator", 0}};
    return rational_json(r.value);
}

template <typename F>
int guarded(const char* name, std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << name << ": " << gauss::to_string(e.kind()) << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << name << ": " << e.what() << "\n";
    }
    return kExitFailure;
}

double relative_difference(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace

json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

// ---------------------------------------------------------------- odds

int run_odds(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded("odds", err, [&] {
        const auto system = gauss::CausalSystem::from_json(read_json_file(config.system_path));
        if (config.events.empty()) throw Error(ErrorKind::InvalidArgument, "no events given");
        if (system.size() < 2) throw Error(ErrorKind::InvalidArgument, "odds need at least two causes");

        const auto comma = config.pair.find(',');
        if (comma == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--pair expects i,j");
        const std::size_t i = parse_cause(config.pair.substr(0, comma), system);
        const std::size_t j = parse_cause(config.pair.substr(comma + 1), system);

        const gauss::OddsState prior = gauss::prior_odds(system, i, j);
        std::vector<gauss::EvidenceItem> items;
        json steps = json::array();
        gauss::OddsState running = prior;
        gauss::CausalSystem current = system;
        for (const auto& event : config.events) {
            items.push_back(gauss::evidence_for(system, event, i, j));
            running = gauss::update_odds(running, items.back());
            current = current.with_priors(gauss::posterior_over_causes(current, event));
            steps.push_back({{"event", event},
                             {"likelihoods", {items.back().h_num(), items.back().h_den()}},
                             {"bayes_factor", json_number(gauss::bayes_factor(items.back()))},
                             {"posterior_odds", json_number(running.odds())}});
        }
        const gauss::OddsState final_odds = gauss::sequential_update(prior, items);

        json posterior = json::object();
        for (std::size_t k = 0; k < current.size(); ++k) posterior[current.labels()[k]] = current.priors()[k];

        const json report = {
            {"pair", {{"numerator", system.labels()[i]}, {"denominator", system.labels()[j]}}},
            {"prior_odds", json_number(prior.odds())},
            {"events", steps},
            {"posterior_odds", json_number(final_odds.odds())},
            {"posterior_probability", final_odds.probability()},
            {"posterior", posterior},
        };
        return emit(report, config, out, err);
    });
}

// ---------------------------------------------------------------- partition

int run_partition(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded("partition", err, [&] {
        const auto p = gauss::CasePartition::from_json(read_json_file(config.counts_path));
        const auto r = gauss::verify_theorem(p);
        using gauss::Hypothesis;
        json joint = json::array();
        for (const auto& q : gauss::joint_probabilities(p)) joint.push_back(rational_json(q));
        const json report = {
            {"counts", p.to_json()},
            {"prior", {{"H", rational_json(gauss::prior(p, Hypothesis::H))},
                       {"H'", rational_json(gauss::prior(p, Hypothesis::HPrime))}}},
            {"likelihood", {{"H", rational_json(gauss::likelihood(p, Hypothesis::H))},
                            {"H'", rational_json(gauss::likelihood(p, Hypothesis::HPrime))}}},
            {"posterior", {{"H", rational_json(gauss::posterior(p, Hypothesis::H))},
                           {"H'", rational_json(gauss::posterior(p, Hypothesis::HPrime))}}},
            {"joint_probabilities", joint},
            {"equal_priors", r.equal_priors},
            {"posterior_ratio", extended_json(r.posterior_ratio)},
            {"likelihood_ratio", extended_json(r.likelihood_ratio)},
            {"prior_ratio", extended_json(r.prior_ratio)},
            {"general_identity_residual", rational_json(r.general_identity_residual)},
        };
        return emit(report, config, out, err);
    });
}

// ---------------------------------------------------------------- fit

int run_fit(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded("fit", err, [&] {
        const json spec = read_json_file(config.model_path);
        std::string formula;
        std::vector<gauss::ParameterAxis> axes;
        try {
            formula = spec.at("formula").get<std::string>();
            for (const auto& a : spec.at("parameters")) {
                const auto points = a.at("points").get<std::int64_t>();
                if (points < 2) throw Error(ErrorKind::InvalidArgument, "axis needs at least 2 points");
                axes.push_back({a.at("name").get<std::string>(), a.at("min").get<double>(), a.at("max").get<double>(),
                                static_cast<std::size_t>(points)});
            }
        } catch (const json::exception& e) {
            throw Error(ErrorKind::ParseFailure, "malformed model spec: " + std::string(e.what()));
        }
        const auto expr = gauss::ModelExpression::parse(formula);
        const gauss::ParameterSpace space(std::move(axes));
        const auto obs = gauss::read_observations_csv_file(config.data_path);

        if (config.threads > 0) gauss::kernels::set_threads(config.threads);
        const auto grid = gauss::evaluate_posterior(expr, obs, space);
        const auto summary = gauss::moments(grid);

        json warnings = json::array();
        for (const auto& axis : gauss::map_boundary_axes(grid)) {
            const std::string msg = "MAP lies on the boundary of axis '" + axis + "'; the bounds may exclude the data-supported region";
            err << "warning: " << msg << "\n";
            warnings.push_back(msg);
        }
        if (!config.grid_dump_path.empty()) {
            std::ofstream dump(config.grid_dump_path, std::ios::binary | std::ios::trunc);
            if (!dump) throw Error(ErrorKind::InvalidArgument, "cannot write '" + config.grid_dump_path + "'");
            gauss::write_grid_csv(grid, dump);
            if (!dump) throw Error(ErrorKind::InvalidArgument, "failed writing '" + config.grid_dump_path + "'");
        }
        json report = summary.to_json();
        report["formula"] = expr.print();
        report["observations"] = obs.size();
        report["nodes"] = space.node_count();
        report["warnings"] = warnings;
        return emit(report, config, out, err);
    });
}

// ---------------------------------------------------------------- sharper

json sharper_report(int deals, int successes, double p_fair, double p_sharp, double prior_odds) {
    if (deals < 0) throw Error(ErrorKind::InvalidArgument, "--deals must be non-negative");
    if (successes < 0 || successes > deals)
        throw Error(ErrorKind::InvalidArgument, "--successes must lie in [0, deals]");
    for (double p : {p_fair, p_sharp})
        if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "probabilities must lie in (0,1)");
    if (!(std::isfinite(prior_odds) && prior_odds >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "--prior-odds must be finite and non-negative");

    const gauss::OddsState prior("sharper", "fair", prior_odds);
    const gauss::EvidenceItem all_deals("deals", gauss::binomial_pmf(deals, successes, p_sharp),
                                        gauss::binomial_pmf(deals, successes, p_fair));
    const double factor = gauss::bayes_factor(all_deals);
    const gauss::OddsState single = gauss::update_odds(prior, all_deals);

    std::vector<gauss::EvidenceItem> chain;
    json per_deal = json::array();
    for (int d = 0; d < deals; ++d) {
        const bool hit = d < successes;
        chain.emplace_back(hit ? "king" : "other", hit ? p_sharp : 1.0 - p_sharp, hit ? p_fair : 1.0 - p_fair);
        per_deal.push_back(gauss::bayes_factor(chain.back()));
    }
    const gauss::OddsState unit("sharper", "fair", 1.0);
    const double chain_factor = gauss::sequential_update(unit, chain).odds();
    const gauss::OddsState sequential = gauss::sequential_update(prior, chain);
    const double diff = relative_difference(factor, chain_factor);

    return {
        {"deals", deals},
        {"successes", successes},
        {"p_fair", p_fair},
        {"p_sharp", p_sharp},
        {"prior_odds", prior_odds},
        {"bayes_factor", json_number(factor)},
        {"posterior_odds", json_number(single.odds())},
        {"posterior_probability", single.probability()},
        {"sequential",
         {{"per_deal_factors", per_deal},
          {"bayes_factor", json_number(chain_factor)},
          {"posterior_odds", json_number(sequential.odds())}}},
        {"relative_difference", diff},
        {"agree", diff <= kChainTolerance},
    };
}

int run_sharper(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded("sharper", err, [&] {
        const json report = sharper_report(config.deals, config.successes, config.p_fair, config.p_sharp,
                                           config.prior_odds);
        if (!report.at("agree").get<bool>()) {
            err << "error: sharper: per-deal chain and single-shot Bayes factor disagree (relative difference "
                << report.at("relative_difference").get<double>() << ")\n";
            return kExitFailure;
        }
        return emit(report, config, out, err);
    });
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    switch (config.subcommand) {
        case Subcommand::Odds: return run_odds(config, out, err);
        case Subcommand::Partition: return run_partition(config, out, err);
        case Subcommand::Fit: return run_fit(config, out, err);
        case Subcommand::Sharper: return run_sharper(config, out, err);
    }
    return kExitFailure;
}

}  // namespace gaussinv
