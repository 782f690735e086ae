#include "gauss/error_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "gauss/error.hpp"

namespace gauss {

namespace {

// log(sqrt(2 pi))
constexpr double kLogSqrtTwoPi = 0.91893853320467274178032973640561764;

}  // namespace

GaussianError::GaussianError(double sigma) : sigma_(sigma) {
    if (!(std::isfinite(sigma) && sigma > 0.0))
        throw Error(ErrorKind::InvalidArgument, "sigma must be positive and finite");
}

double phi_density(double delta, const GaussianError& err) {
    const double z = delta / err.sigma();
    return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * err.sigma());
}

double log_phi_density(double delta, const GaussianError& err) {
    const double z = delta / err.sigma();
    return -0.5 * z * z - kLogSqrtTwoPi - std::log(err.sigma());
}

double interval_probability(double lower, double upper, const GaussianError& err) {
    if (std::isnan(lower) || std::isnan(upper))
        throw Error(ErrorKind::InvalidArgument, "interval bound is NaN");
    if (lower > upper) throw Error(ErrorKind::InvertedInterval, "interval lower bound exceeds upper bound");
    const double scale = err.sigma() * std::numbers::sqrt2;
    const double a = lower / scale;
    const double b = upper / scale;
    // P(X > x) = erfc(x)/2 is accurate in the upper tail; mirror for the lower.
    double p;
    if (a >= 0.0) {
        p = 0.5 * (std::erfc(a) - std::erfc(b));
    } else if (b <= 0.0) {
        p = 0.5 * (std::erfc(-b) - std::erfc(-a));
    } else {
        p = 1.0 - 0.5 * (std::erfc(-a) + std::erfc(b));
    }
    return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------- ObservationSet

ObservationSet::ObservationSet(std::span<const ObservationRecord> records) {
    if (records.empty()) throw Error(ErrorKind::InvalidArgument, "observation set is empty");
    for (const auto& [name, _] : records.front().covariates) names_.push_back(name);
    columns_.assign(names_.size(), {});
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!std::isfinite(r.value))
            throw Error(ErrorKind::InvalidArgument, "observation " + std::to_string(i) + " is not finite", i);
        if (r.covariates.size() != names_.size())
            throw Error(ErrorKind::InvalidArgument,
                        "observation " + std::to_string(i) + " has inconsistent covariates", i);
        std::size_t k = 0;
        for (const auto& [name, v] : r.covariates) {
            if (name != names_[k])
                throw Error(ErrorKind::InvalidArgument,
                            "observation " + std::to_string(i) + " has inconsistent covariates", i);
            if (!std::isfinite(v))
                throw Error(ErrorKind::InvalidArgument,
                            "covariate '" + name + "' of observation " + std::to_string(i) + " is not finite", i);
            columns_[k++].push_back(v);
        }
        values_.push_back(r.value);
        sigmas_.push_back(r.error.sigma());
    }
}

ObservationRecord ObservationSet::record(std::size_t i) const {
    ObservationRecord r{{}, values_.at(i), GaussianError(sigmas_.at(i))};
    for (std::size_t k = 0; k < names_.size(); ++k) r.covariates.emplace(names_[k], columns_[k][i]);
    return r;
}

ObservationSet ObservationSet::slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) throw Error(ErrorKind::InvalidArgument, "slice out of range");
    std::vector<ObservationRecord> recs;
    recs.reserve(count);
    for (std::size_t i = first; i < first + count; ++i) recs.push_back(record(i));
    return ObservationSet(recs);
}

// ---------------------------------------------------------------- log Omega

double log_omega_constant(const ObservationSet& obs) {
    double c = 0.0;
    for (double s : obs.sigmas()) c -= kLogSqrtTwoPi + std::log(s);
    return c;
}

double chi_squared(const ObservationSet& obs, std::span<const double> predictions) {
    if (predictions.size() != obs.size())
        throw Error(ErrorKind::InvalidArgument, "expected " + std::to_string(obs.size()) + " predictions, got " +
                                                    std::to_string(predictions.size()));
    const auto& v = obs.values();
    const auto& s = obs.sigmas();
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (!std::isfinite(predictions[i]))
            throw Error(ErrorKind::InvalidPrediction, "prediction " + std::to_string(i) + " is not finite", i);
        const double z = (v[i] - predictions[i]) / s[i];
        acc += z * z;
    }
    return acc;
}

double log_omega(const ObservationSet& obs, std::span<const double> predictions) {
    return log_omega_constant(obs) - 0.5 * chi_squared(obs, predictions);
}

// ---------------------------------------------------------------- CSV

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(const std::string& field, std::size_t line_no) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || field.empty())
        throw Error(ErrorKind::ParseFailure,
                    "line " + std::to_string(line_no) + ": '" + field + "' is not a number");
    return v;
}

}  // namespace

ObservationSet read_observations_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        header = split_csv_line(line);
        break;
    }
    if (header.empty()) throw Error(ErrorKind::ParseFailure, "observation CSV has no header");

    std::ptrdiff_t value_col = -1, sigma_col = -1;
    std::set<std::string> seen;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c].empty()) throw Error(ErrorKind::ParseFailure, "empty column name in CSV header");
        if (!seen.insert(header[c]).second)
            throw Error(ErrorKind::ParseFailure, "duplicate column '" + header[c] + "' in CSV header");
        if (header[c] == "value") value_col = static_cast<std::ptrdiff_t>(c);
        if (header[c] == "sigma") sigma_col = static_cast<std::ptrdiff_t>(c);
    }
    if (value_col < 0 || sigma_col < 0)
        throw Error(ErrorKind::ParseFailure, "CSV header must contain 'value' and 'sigma' columns");

    std::vector<ObservationRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw Error(ErrorKind::ParseFailure, "line " + std::to_string(line_no) + ": expected " +
                                                     std::to_string(header.size()) + " fields, got " +
                                                     std::to_string(fields.size()));
        ObservationRecord r;
        double sigma = 0.0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const double v = parse_number(fields[c], line_no);
            if (static_cast<std::ptrdiff_t>(c) == value_col)
                r.value = v;
            else if (static_cast<std::ptrdiff_t>(c) == sigma_col)
                sigma = v;
            else
                r.covariates.emplace(header[c], v);
        }
        try {
            r.error = GaussianError(sigma);
        } catch (const Error&) {
            throw Error(ErrorKind::ParseFailure, "line " + std::to_string(line_no) + ": sigma must be positive");
        }
        records.push_back(std::move(r));
    }
    if (records.empty()) throw Error(ErrorKind::ParseFailure, "observation CSV has no records");
    return ObservationSet(records);
}

ObservationSet read_observations_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseFailure, "cannot open '" + path + "'");
    return read_observations_csv(in);
}

}  // namespace gauss
