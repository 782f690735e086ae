#pragma once

// Flat-prior posterior over a box of parameter values, evaluated on a grid:
// density proportional to the joint observation density Omega, normalized
// by lambda so that its discrete integral over the box is 1.

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gauss/error_model.hpp"
#include "gauss/expr.hpp"

namespace gauss {

enum class Execution { Serial, Parallel };

class PosteriorGrid {
public:
    /// Grid from explicit log densities (row-major, last axis fastest).
    /// Entries may be -inf; NaN and +inf are rejected. Throws
    /// DegeneratePosterior when no entry is finite.
    PosteriorGrid(ParameterSpace space, std::vector<double> log_density,
                  Execution exec = Execution::Parallel);

    /// Grid whose log density is offset - chi2/2 at each node.
    static PosteriorGrid from_chi_squared(ParameterSpace space, std::span<const double> chi2, double offset,
                                          Execution exec = Execution::Parallel);

    const ParameterSpace& space() const noexcept { return space_; }
    std::size_t size() const noexcept { return relative_.size(); }

    /// log Omega at a node (unnormalized).
    double log_density(std::size_t node) const { return offset_ + relative_.at(node); }
    /// Normalized posterior density lambda * Omega at a node.
    double density(std::size_t node) const;
    double log_lambda() const noexcept { return log_lambda_; }
    double cell_volume() const noexcept { return space_.cell_volume(); }

    /// Node with the largest log density; ties go to the lowest index.
    std::size_t map_node() const noexcept { return map_node_; }
    std::map<std::string, double> node_point(std::size_t node) const;

    /// Probability mass of every node, density * cell_volume.
    std::vector<double> masses(Execution exec = Execution::Parallel) const;

private:
    PosteriorGrid(ParameterSpace space, std::vector<double> relative, double offset, Execution exec);

    ParameterSpace space_;
    // log Omega = offset_ + relative_[node]. For model grids relative_ is
    // -chi2/2 exactly, which keeps the MAP identical to the chi2 minimizer.
    std::vector<double> relative_;
    double offset_ = 0.0;
    double log_lambda_ = 0.0;
    std::size_t map_node_ = 0;
};

/// Every axis name must occur in the formula; other names in it are taken
/// from the observation covariates.
PosteriorGrid evaluate_posterior(const ModelExpression& expr, const ObservationSet& obs,
                                 const ParameterSpace& space, Execution exec = Execution::Parallel);

/// log lambda = -log(sum_nodes Omega * cell_volume).
double normalization_lambda(const PosteriorGrid& grid);

std::map<std::string, double> map_estimate(const PosteriorGrid& grid);

/// Axes on which the MAP node is the first or last grid point.
std::vector<std::string> map_boundary_axes(const PosteriorGrid& grid);

struct MarginalTable {
    std::string axis;
    double spacing = 0.0;
    std::vector<double> nodes;
    /// Density per unit of the axis; sum(density) * spacing == 1.
    std::vector<double> density;
};

MarginalTable marginal(const PosteriorGrid& grid, const std::string& axis, Execution exec = Execution::Parallel);

struct PosteriorSummary {
    std::map<std::string, double> map_point;
    std::map<std::string, double> mean;
    std::map<std::string, double> std;
    double log_lambda = 0.0;

    nlohmann::json to_json() const;
};

PosteriorSummary moments(const PosteriorGrid& grid, Execution exec = Execution::Parallel);

struct WeightedMean {
    double mean = 0.0;
    double sigma = 0.0;
};

/// Inverse-variance weighted average and its standard error.
WeightedMean weighted_mean(std::span<const double> values, std::span<const double> sigmas);

/// sum_i ((value_i - V_i(params)) / sigma_i)^2
double chi_squared(const ModelExpression& expr, const ObservationSet& obs,
                   const std::map<std::string, double>& params);

/// One row per node: parameter values, log_density, density.
void write_grid_csv(const PosteriorGrid& grid, std::ostream& out);

}  // namespace gauss
