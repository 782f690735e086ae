#pragma once

// Data-parallel kernels behind the posterior grid. Every kernel has a plain
// serial reference (namespace serial) and an OpenMP version (namespace
// parallel). The OpenMP versions reduce over fixed-size blocks combined in
// block order, so their output does not depend on the thread count.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gauss/error_model.hpp"
#include "gauss/expr.hpp"

namespace gauss::kernels {

/// Block length for deterministic reductions.
inline constexpr std::size_t kReductionBlock = 2048;

/// Model bound with slots [axis names..., covariate names...].
struct GridProblem {
    const BoundExpression& model;
    const ObservationSet& obs;
    const ParameterSpace& space;
};

/// First node (lowest index) at which the model went non-finite.
struct NodeFault {
    std::size_t node = 0;
    std::size_t record = 0;
    std::size_t instruction = 0;
};

struct AxisMoments {
    std::vector<double> mean;
    std::vector<double> variance;
};

namespace serial {

std::optional<NodeFault> chi_squared_grid(const GridProblem& problem, std::span<double> out);
double log_sum_exp(std::span<const double> x);
std::size_t argmax(std::span<const double> x);
/// mass[i] = exp(x[i] + shift)
void exponentiate(std::span<const double> x, double shift, std::span<double> mass);
AxisMoments moments(const ParameterSpace& space, std::span<const double> mass);
std::vector<double> marginal_mass(const ParameterSpace& space, std::span<const double> mass, std::size_t axis);

}  // namespace serial

namespace parallel {

std::optional<NodeFault> chi_squared_grid(const GridProblem& problem, std::span<double> out);
double log_sum_exp(std::span<const double> x);
std::size_t argmax(std::span<const double> x);
void exponentiate(std::span<const double> x, double shift, std::span<double> mass);
AxisMoments moments(const ParameterSpace& space, std::span<const double> mass);
std::vector<double> marginal_mass(const ParameterSpace& space, std::span<const double> mass, std::size_t axis);

}  // namespace parallel

/// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads() noexcept;
void set_threads(int n) noexcept;

}  // namespace gauss::kernels
