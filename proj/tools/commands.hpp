#pragma once

// Subcommands of the gaussinv tool. Each writes its JSON report to
// `out_path` (or `out` when empty) and diagnostics to `err`, and returns
// the process exit status: 0 iff a complete report was written.

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace gaussinv {

enum class Subcommand { Odds, Partition, Fit, Sharper };

struct RunConfig {
    Subcommand subcommand = Subcommand::Odds;
    std::string out_path;

    // odds
    std::string system_path;
    std::vector<std::string> events;
    std::string pair = "0,1";

    // partition
    std::string counts_path;

    // fit
    std::string model_path;
    std::string data_path;
    std::string grid_dump_path;
    int threads = 0;  // 0: OpenMP default

    // sharper
    int deals = 10;
    int successes = 6;
    double p_fair = std::numeric_limits<double>::quiet_NaN();
    double p_sharp = std::numeric_limits<double>::quiet_NaN();
    double prior_odds = 1.0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_odds(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_partition(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_fit(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_sharper(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Finite doubles as JSON numbers, infinities as "inf" / "-inf".
nlohmann::json json_number(double v);

/// Report bodies, separated from I/O for testing.
nlohmann::json sharper_report(int deals, int successes, double p_fair, double p_sharp, double prior_odds);

}  // namespace gaussinv
