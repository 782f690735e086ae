// Times posterior evaluation and summaries, serial reference vs OpenMP.
//   grid_bench [points-per-axis] [records] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "gauss/grid_kernels.hpp"
#include "gauss/posterior.hpp"

using namespace gauss;

namespace {

double time_run(const ModelExpression& expr, const ObservationSet& obs, const ParameterSpace& space, Execution exec,
                int repeats, double& checksum) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto grid = evaluate_posterior(expr, obs, space, exec);
        const auto summary = moments(grid, exec);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        best = std::min(best, secs);
        checksum = summary.mean.at("p") + summary.mean.at("q") + grid.log_lambda();
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t points = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 401;
    const int records = argc > 2 ? std::atoi(argv[2]) : 50;
    const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;

    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise(0.0, 0.2);
    std::vector<ObservationRecord> recs;
    for (int i = 0; i < records; ++i) {
        const double t = 10.0 * i / records;
        recs.push_back({{{"t", t}}, 1.0 + 0.5 * t + noise(rng), GaussianError(0.2)});
    }
    const ObservationSet obs(recs);
    const auto expr = ModelExpression::parse("p + q*t");
    const ParameterSpace space({{"p", 0.0, 2.0, points}, {"q", 0.0, 1.0, points}});

    double cs = 0, cp = 0;
    const double ts = time_run(expr, obs, space, Execution::Serial, repeats, cs);
    const double tp = time_run(expr, obs, space, Execution::Parallel, repeats, cp);
    std::printf("grid %zux%zu, %d records, %d threads\n", points, points, records, kernels::max_threads());
    std::printf("serial    %.4f s\n", ts);
    std::printf("parallel  %.4f s  (speedup %.2fx)\n", tp, ts / tp);
    std::printf("checksum  serial %.17g parallel %.17g\n", cs, cp);
    return 0;
}
