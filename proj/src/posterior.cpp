#include "gauss/posterior.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "gauss/error.hpp"
#include "gauss/grid_kernels.hpp"

namespace gauss {

namespace {

double lse(std::span<const double> x, Execution exec) {
    return exec == Execution::Parallel ? kernels::parallel::log_sum_exp(x) : kernels::serial::log_sum_exp(x);
}

std::size_t arg_max(std::span<const double> x, Execution exec) {
    return exec == Execution::Parallel ? kernels::parallel::argmax(x) : kernels::serial::argmax(x);
}

void append_number(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

// ---------------------------------------------------------------- PosteriorGrid

PosteriorGrid::PosteriorGrid(ParameterSpace space, std::vector<double> log_density, Execution exec)
    : PosteriorGrid(std::move(space), std::move(log_density), 0.0, exec) {}

PosteriorGrid::PosteriorGrid(ParameterSpace space, std::vector<double> relative, double offset, Execution exec)
    : space_(std::move(space)), relative_(std::move(relative)), offset_(offset) {
    if (relative_.size() != space_.node_count())
        throw Error(ErrorKind::InvalidArgument, "log density has " + std::to_string(relative_.size()) +
                                                    " entries for " + std::to_string(space_.node_count()) + " nodes");
    if (!std::isfinite(offset_)) throw Error(ErrorKind::InvalidArgument, "log density offset is not finite");
    for (std::size_t i = 0; i < relative_.size(); ++i)
        if (std::isnan(relative_[i]) || relative_[i] == std::numeric_limits<double>::infinity())
            throw Error(ErrorKind::InvalidArgument, "log density at node " + std::to_string(i) + " is NaN or +inf", i);

    const double log_mass = lse(relative_, exec);
    if (!std::isfinite(log_mass))
        throw Error(ErrorKind::DegeneratePosterior, "posterior density is zero at every grid node");
    log_lambda_ = -(offset_ + log_mass + std::log(space_.cell_volume()));
    map_node_ = arg_max(relative_, exec);
}

PosteriorGrid PosteriorGrid::from_chi_squared(ParameterSpace space, std::span<const double> chi2, double offset,
                                              Execution exec) {
    std::vector<double> rel(chi2.size());
    for (std::size_t i = 0; i < chi2.size(); ++i) rel[i] = -0.5 * chi2[i];
    return PosteriorGrid(std::move(space), std::move(rel), offset, exec);
}

double PosteriorGrid::density(std::size_t node) const {
    return std::exp(offset_ + relative_.at(node) + log_lambda_);
}

std::map<std::string, double> PosteriorGrid::node_point(std::size_t node) const {
    std::map<std::string, double> out;
    const auto idx = space_.multi_index(node);
    for (std::size_t k = 0; k < space_.dimension(); ++k) out.emplace(space_.axis(k).name, space_.coordinate(k, idx[k]));
    return out;
}

std::vector<double> PosteriorGrid::masses(Execution exec) const {
    std::vector<double> mass(relative_.size());
    const double shift = offset_ + log_lambda_ + std::log(space_.cell_volume());
    if (exec == Execution::Parallel)
        kernels::parallel::exponentiate(relative_, shift, mass);
    else
        kernels::serial::exponentiate(relative_, shift, mass);
    return mass;
}

// ---------------------------------------------------------------- operations

PosteriorGrid evaluate_posterior(const ModelExpression& expr, const ObservationSet& obs,
                                 const ParameterSpace& space, Execution exec) {
    const auto names = expr.names();
    std::vector<std::string> slots = space.names();
    for (const auto& axis : slots)
        if (!names.contains(axis))
            throw Error(ErrorKind::InvalidArgument, "parameter '" + axis + "' does not occur in the model");
    for (const auto& cov : obs.covariate_names()) {
        if (std::find(slots.begin(), slots.end(), cov) != slots.end())
            throw Error(ErrorKind::AmbiguousBinding, "'" + cov + "' is both a parameter and a covariate");
        slots.push_back(cov);
    }
    const BoundExpression model(expr, slots);

    std::vector<double> chi2(space.node_count());
    const kernels::GridProblem problem{model, obs, space};
    const auto fault = exec == Execution::Parallel ? kernels::parallel::chi_squared_grid(problem, chi2)
                                                   : kernels::serial::chi_squared_grid(problem, chi2);
    if (fault) {
        std::string where;
        const auto idx = space.multi_index(fault->node);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (k > 0) where += ", ";
            where += space.axis(k).name + "=";
            append_number(where, space.coordinate(k, idx[k]));
        }
        throw Error(ErrorKind::DomainError,
                    "model is non-finite at node (" + where + "), record " + std::to_string(fault->record) +
                        ", in sub-expression '" + model.describe(fault->instruction) + "'",
                    fault->node);
    }
    return PosteriorGrid::from_chi_squared(space, chi2, log_omega_constant(obs), exec);
}

double normalization_lambda(const PosteriorGrid& grid) { return grid.log_lambda(); }

std::map<std::string, double> map_estimate(const PosteriorGrid& grid) { return grid.node_point(grid.map_node()); }

std::vector<std::string> map_boundary_axes(const PosteriorGrid& grid) {
    std::vector<std::string> out;
    const auto idx = grid.space().multi_index(grid.map_node());
    for (std::size_t k = 0; k < idx.size(); ++k)
        if (idx[k] == 0 || idx[k] + 1 == grid.space().axis(k).points) out.push_back(grid.space().axis(k).name);
    return out;
}

MarginalTable marginal(const PosteriorGrid& grid, const std::string& axis, Execution exec) {
    const auto& space = grid.space();
    const std::size_t k = space.axis_index(axis);
    const auto mass = grid.masses(exec);
    auto table = exec == Execution::Parallel ? kernels::parallel::marginal_mass(space, mass, k)
                                             : kernels::serial::marginal_mass(space, mass, k);
    MarginalTable out{axis, space.spacing(k), {}, {}};
    for (std::size_t i = 0; i < table.size(); ++i) {
        out.nodes.push_back(space.coordinate(k, i));
        out.density.push_back(table[i] / out.spacing);
    }
    return out;
}

nlohmann::json PosteriorSummary::to_json() const {
    return {{"map", map_point}, {"mean", mean}, {"std", std}, {"log_lambda", log_lambda}};
}

PosteriorSummary moments(const PosteriorGrid& grid, Execution exec) {
    const auto mass = grid.masses(exec);
    const auto m = exec == Execution::Parallel ? kernels::parallel::moments(grid.space(), mass)
                                               : kernels::serial::moments(grid.space(), mass);
    PosteriorSummary s;
    s.map_point = map_estimate(grid);
    s.log_lambda = grid.log_lambda();
    for (std::size_t k = 0; k < grid.space().dimension(); ++k) {
        const auto& name = grid.space().axis(k).name;
        s.mean[name] = m.mean[k];
        s.std[name] = std::sqrt(m.variance[k]);
    }
    return s;
}

WeightedMean weighted_mean(std::span<const double> values, std::span<const double> sigmas) {
    if (values.empty()) throw Error(ErrorKind::InvalidArgument, "weighted mean of no values");
    if (values.size() != sigmas.size())
        throw Error(ErrorKind::InvalidArgument, "values and sigmas differ in length");
    double wsum = 0.0, wv = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(std::isfinite(sigmas[i]) && sigmas[i] > 0.0))
            throw Error(ErrorKind::InvalidArgument, "sigma " + std::to_string(i) + " must be positive", i);
        const double w = 1.0 / (sigmas[i] * sigmas[i]);
        wsum += w;
        wv += w * values[i];
    }
    return {wv / wsum, 1.0 / std::sqrt(wsum)};
}

double chi_squared(const ModelExpression& expr, const ObservationSet& obs,
                   const std::map<std::string, double>& params) {
    const auto pred = predictions(expr, params, obs);
    return chi_squared(obs, pred);
}

void write_grid_csv(const PosteriorGrid& grid, std::ostream& out) {
    const auto& space = grid.space();
    std::string line;
    for (const auto& axis : space.axes()) line += axis.name + ",";
    line += "log_density,density\n";
    out << line;
    std::vector<std::size_t> idx(space.dimension(), 0);
    for (std::size_t node = 0; node < grid.size(); ++node) {
        line.clear();
        for (std::size_t k = 0; k < space.dimension(); ++k) {
            append_number(line, space.coordinate(k, idx[k]));
            line += ',';
        }
        append_number(line, grid.log_density(node));
        line += ',';
        append_number(line, grid.density(node));
        line += '\n';
        out << line;
        for (std::size_t k = space.dimension(); k-- > 0;) {
            if (++idx[k] < space.axis(k).points) break;
            idx[k] = 0;
        }
    }
}

}  // namespace gauss
