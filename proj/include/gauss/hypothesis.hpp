#pragma once

// Discrete probability inversion over a complete class of causes:
// Bayes' rule, Bayes factors and odds updating.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gauss {

/// Tolerance used when checking that priors form a probability distribution.
inline constexpr double kProbabilitySumTolerance = 1e-12;

/// An exhaustive set of mutually exclusive causes with their prior
/// probabilities and, for each registered event, the likelihood of that
/// event under every cause. Immutable once constructed.
class CausalSystem {
public:
    CausalSystem(std::vector<std::string> labels, std::vector<double> priors,
                 std::map<std::string, std::vector<double>> likelihoods);

    /// {"causes":[{"label":..,"prior":..}], "events":{name:[...]}}
    static CausalSystem from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<double>& priors() const noexcept { return priors_; }
    std::size_t index_of(const std::string& label) const;

    bool has_event(const std::string& event) const { return likelihoods_.contains(event); }
    const std::vector<double>& likelihoods(const std::string& event) const;
    const std::map<std::string, std::vector<double>>& events() const noexcept { return likelihoods_; }

    /// Same causes and events with the priors replaced (e.g. by a posterior).
    CausalSystem with_priors(std::vector<double> priors) const;

private:
    std::vector<std::string> labels_;
    std::vector<double> priors_;
    std::map<std::string, std::vector<double>> likelihoods_;
};

/// Probabilities of one event under a numerator and a denominator hypothesis.
/// Rejects values outside [0,1] and the meaningless pair (0, 0).
class EvidenceItem {
public:
    EvidenceItem(std::string event_label, double h_num, double h_den);

    const std::string& event_label() const noexcept { return label_; }
    double h_num() const noexcept { return h_num_; }
    double h_den() const noexcept { return h_den_; }

private:
    std::string label_;
    double h_num_;
    double h_den_;
};

/// Odds of one cause against another. Arithmetic on odds goes through the
/// natural log, so long evidence chains neither underflow nor overflow; zero
/// odds have log -inf and infinite odds +inf. The linear value is kept
/// alongside: exact when the state was built from a ratio, exp(log) otherwise.
class OddsState {
public:
    OddsState(std::string numerator_label, std::string denominator_label, double odds);

    static OddsState from_log(std::string numerator_label, std::string denominator_label,
                              double log_odds);

    const std::string& numerator_label() const noexcept { return num_; }
    const std::string& denominator_label() const noexcept { return den_; }
    double log_odds() const noexcept { return log_odds_; }
    double odds() const noexcept { return odds_; }
    /// odds / (1 + odds), with infinite odds mapping to 1.
    double probability() const noexcept;

private:
    OddsState() = default;
    std::string num_;
    std::string den_;
    double odds_ = 1.0;
    double log_odds_ = 0.0;
};

std::vector<double> posterior_over_causes(const CausalSystem& system, const std::string& event);

/// h_num / h_den; +inf when h_den is zero.
double bayes_factor(const EvidenceItem& item);
double log_bayes_factor(const EvidenceItem& item);

OddsState update_odds(const OddsState& prior, const EvidenceItem& item);

/// Chained update for independent evidence. The log factors are summed in
/// sorted order, so any permutation of `items` gives a bit-identical result.
OddsState sequential_update(const OddsState& prior, std::span<const EvidenceItem> items);

OddsState odds_from_posteriors(const CausalSystem& system, const std::string& event, std::size_t i,
                               std::size_t j);

/// Prior odds P(C_i)/P(C_j) labelled with the two causes.
OddsState prior_odds(const CausalSystem& system, std::size_t i, std::size_t j);

/// Evidence item for one event, causes i (numerator) against j.
EvidenceItem evidence_for(const CausalSystem& system, const std::string& event, std::size_t i,
                          std::size_t j);

double binomial_log_pmf(int trials, int successes, double p);
double binomial_pmf(int trials, int successes, double p);

}  // namespace gauss
