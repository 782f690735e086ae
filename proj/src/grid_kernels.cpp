#include "gauss/grid_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gauss::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t block_count(std::size_t n) { return (n + kReductionBlock - 1) / kReductionBlock; }

// Loads the axis coordinates of `node` into slots[0, dim).
void load_coordinates(const ParameterSpace& space, std::size_t node, std::span<double> slots) {
    const auto& strides = space.strides();
    for (std::size_t k = 0; k < space.dimension(); ++k) {
        const std::size_t i = node / strides[k];
        node %= strides[k];
        slots[k] = space.coordinate(k, i);
    }
}

// chi^2 at one node. The residual arithmetic matches gauss::chi_squared()
// operation for operation, so both give bit-identical sums.
bool node_chi_squared(const GridProblem& p, std::size_t node, std::span<double> slots, double& chi2,
                      NodeFault& fault) noexcept {
    const std::size_t dim = p.space.dimension();
    load_coordinates(p.space, node, slots);
    const auto& values = p.obs.values();
    const auto& sigmas = p.obs.sigmas();
    const std::size_t ncov = p.obs.covariate_names().size();
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t c = 0; c < ncov; ++c) slots[dim + c] = p.obs.covariate(c)[i];
        double pred = 0.0;
        std::size_t instr = 0;
        if (!p.model.try_evaluate(slots, pred, instr)) {
            fault = {node, i, instr};
            return false;
        }
        const double z = (values[i] - pred) / sigmas[i];
        acc += z * z;
    }
    chi2 = acc;
    return true;
}

std::size_t slot_count(const GridProblem& p) {
    return std::max(p.model.slot_count(), p.space.dimension() + p.obs.covariate_names().size());
}

double block_max(std::span<const double> x, std::size_t b) {
    const std::size_t lo = b * kReductionBlock;
    const std::size_t hi = std::min(x.size(), lo + kReductionBlock);
    double m = kNegInf;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, x[i]);
    return m;
}

}  // namespace

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) noexcept {
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, n));
#else
    (void)n;
#endif
}

// ====================================================================== serial

namespace serial {

std::optional<NodeFault> chi_squared_grid(const GridProblem& problem, std::span<double> out) {
    std::vector<double> slots(slot_count(problem));
    for (std::size_t node = 0; node < out.size(); ++node) {
        NodeFault fault;
        if (!node_chi_squared(problem, node, slots, out[node], fault)) return fault;
    }
    return std::nullopt;
}

double log_sum_exp(std::span<const double> x) {
    double m = kNegInf;
    for (double v : x) m = std::max(m, v);
    if (m == kNegInf) return kNegInf;
    double sum = 0.0;
    for (double v : x) sum += std::exp(v - m);
    return m + std::log(sum);
}

std::size_t argmax(std::span<const double> x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        if (x[i] > x[best]) best = i;
    return best;
}

void exponentiate(std::span<const double> x, double shift, std::span<double> mass) {
    for (std::size_t i = 0; i < x.size(); ++i) mass[i] = std::exp(x[i] + shift);
}

AxisMoments moments(const ParameterSpace& space, std::span<const double> mass) {
    const std::size_t dim = space.dimension();
    AxisMoments m{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
    double total = 0.0;
    for (std::size_t node = 0; node < mass.size(); ++node) {
        const auto idx = space.multi_index(node);
        total += mass[node];
        for (std::size_t k = 0; k < dim; ++k) m.mean[k] += mass[node] * space.coordinate(k, idx[k]);
    }
    for (auto& v : m.mean) v /= total;
    for (std::size_t node = 0; node < mass.size(); ++node) {
        const auto idx = space.multi_index(node);
        for (std::size_t k = 0; k < dim; ++k) {
            const double d = space.coordinate(k, idx[k]) - m.mean[k];
            m.variance[k] += mass[node] * d * d;
        }
    }
    for (auto& v : m.variance) v /= total;
    return m;
}

std::vector<double> marginal_mass(const ParameterSpace& space, std::span<const double> mass, std::size_t axis) {
    std::vector<double> out(space.axis(axis).points, 0.0);
    for (std::size_t node = 0; node < mass.size(); ++node) out[space.multi_index(node)[axis]] += mass[node];
    return out;
}

}  // namespace serial

// ==================================================================== parallel

namespace parallel {

std::optional<NodeFault> chi_squared_grid(const GridProblem& problem, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
    const std::size_t nslots = slot_count(problem);
    std::optional<NodeFault> first;
#pragma omp parallel
    {
        std::vector<double> slots(nslots);
        std::optional<NodeFault> local;
#pragma omp for schedule(static)
        for (std::ptrdiff_t node = 0; node < n; ++node) {
            if (local) continue;  // this thread already failed at a lower node
            NodeFault fault;
            if (!node_chi_squared(problem, static_cast<std::size_t>(node), slots, out[node], fault)) local = fault;
        }
        if (local) {
#pragma omp critical(gauss_fault)
            if (!first || local->node < first->node) first = local;
        }
    }
    return first;
}

double log_sum_exp(std::span<const double> x) {
    const std::size_t nb = block_count(x.size());
    std::vector<double> partial(nb);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b)
        partial[b] = block_max(x, static_cast<std::size_t>(b));
    double m = kNegInf;
    for (double v : partial) m = std::max(m, v);
    if (m == kNegInf) return kNegInf;

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
        const std::size_t hi = std::min(x.size(), lo + kReductionBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += std::exp(x[i] - m);
        partial[b] = s;
    }
    double sum = 0.0;
    for (double v : partial) sum += v;
    return m + std::log(sum);
}

std::size_t argmax(std::span<const double> x) {
    const std::size_t nb = block_count(x.size());
    std::vector<std::size_t> best(nb);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
        const std::size_t hi = std::min(x.size(), lo + kReductionBlock);
        std::size_t i_best = lo;
        for (std::size_t i = lo + 1; i < hi; ++i)
            if (x[i] > x[i_best]) i_best = i;
        best[b] = i_best;
    }
    std::size_t result = best.empty() ? 0 : best[0];
    for (std::size_t b = 1; b < nb; ++b)
        if (x[best[b]] > x[result]) result = best[b];
    return result;
}

void exponentiate(std::span<const double> x, double shift, std::span<double> mass) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i) mass[i] = std::exp(x[i] + shift);
}

AxisMoments moments(const ParameterSpace& space, std::span<const double> mass) {
    const std::size_t dim = space.dimension();
    const std::size_t nb = block_count(mass.size());
    // Row b holds [total, sum_k ...] for block b.
    std::vector<double> partial(nb * (dim + 1), 0.0);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
        const std::size_t hi = std::min(mass.size(), lo + kReductionBlock);
        double* row = &partial[static_cast<std::size_t>(b) * (dim + 1)];
        for (std::size_t node = lo; node < hi; ++node) {
            const auto idx = space.multi_index(node);
            row[0] += mass[node];
            for (std::size_t k = 0; k < dim; ++k) row[k + 1] += mass[node] * space.coordinate(k, idx[k]);
        }
    }
    AxisMoments m{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
    double total = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        total += partial[b * (dim + 1)];
        for (std::size_t k = 0; k < dim; ++k) m.mean[k] += partial[b * (dim + 1) + k + 1];
    }
    for (auto& v : m.mean) v /= total;

    std::fill(partial.begin(), partial.end(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
        const std::size_t hi = std::min(mass.size(), lo + kReductionBlock);
        double* row = &partial[static_cast<std::size_t>(b) * (dim + 1)];
        for (std::size_t node = lo; node < hi; ++node) {
            const auto idx = space.multi_index(node);
            for (std::size_t k = 0; k < dim; ++k) {
                const double d = space.coordinate(k, idx[k]) - m.mean[k];
                row[k + 1] += mass[node] * d * d;
            }
        }
    }
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t k = 0; k < dim; ++k) m.variance[k] += partial[b * (dim + 1) + k + 1];
    for (auto& v : m.variance) v /= total;
    return m;
}

std::vector<double> marginal_mass(const ParameterSpace& space, std::span<const double> mass, std::size_t axis) {
    const std::size_t points = space.axis(axis).points;
    const std::size_t inner = space.strides()[axis];
    const std::size_t outer = mass.size() / (points * inner);
    std::vector<double> out(points, 0.0);
    // Each entry sums its nodes in lexicographic order.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(points); ++i) {
        double s = 0.0;
        for (std::size_t o = 0; o < outer; ++o) {
            const std::size_t base = o * points * inner + static_cast<std::size_t>(i) * inner;
            for (std::size_t r = 0; r < inner; ++r) s += mass[base + r];
        }
        out[i] = s;
    }
    return out;
}

}  // namespace parallel

}  // namespace gauss::kernels
