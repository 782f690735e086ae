#pragma once

// Gaussian observation errors and the joint density of independent
// observations given their model predictions.

#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gauss {

/// Error law of one observation: a zero-mean Gaussian with scale sigma.
class GaussianError {
public:
    explicit GaussianError(double sigma);
    double sigma() const noexcept { return sigma_; }

private:
    double sigma_;
};

double phi_density(double delta, const GaussianError& err);
double log_phi_density(double delta, const GaussianError& err);

/// Probability that the error lies in [lower, upper]. Bounds may be
/// infinite. Evaluated through erfc on whichever tail keeps precision.
double interval_probability(double lower, double upper, const GaussianError& err);

struct ObservationRecord {
    std::map<std::string, double> covariates;
    double value = 0.0;
    GaussianError error{1.0};
};

/// Measured values with their covariates and error scales, stored by column.
class ObservationSet {
public:
    explicit ObservationSet(std::span<const ObservationRecord> records);

    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<std::string>& covariate_names() const noexcept { return names_; }
    /// Column of covariate `k` (same order as covariate_names()).
    const std::vector<double>& covariate(std::size_t k) const { return columns_.at(k); }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<double>& sigmas() const noexcept { return sigmas_; }
    ObservationRecord record(std::size_t i) const;

    /// Records [first, first + count) as a new set.
    ObservationSet slice(std::size_t first, std::size_t count) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
    std::vector<double> values_;
    std::vector<double> sigmas_;
};

/// -sum_i log(sqrt(2 pi) sigma_i): the part of log Omega independent of the
/// predictions.
double log_omega_constant(const ObservationSet& obs);

/// sum_i ((value_i - prediction_i) / sigma_i)^2, accumulated in record order.
double chi_squared(const ObservationSet& obs, std::span<const double> predictions);

/// log of the joint density of all observations, sum_i log phi(value_i - prediction_i).
double log_omega(const ObservationSet& obs, std::span<const double> predictions);

/// CSV with header `covariate...,value,sigma`.
ObservationSet read_observations_csv(std::istream& in);
ObservationSet read_observations_csv_file(const std::string& path);

}  // namespace gauss
