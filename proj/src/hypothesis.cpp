#include "gauss/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gauss/error.hpp"

namespace gauss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

// Exact-ish log that maps 0 to -inf and +inf to +inf without raising.
double safe_log(double x) {
    if (x == 0.0) return -kInf;
    if (std::isinf(x)) return kInf;
    return std::log(x);
}

std::string fmt_index(std::size_t i) { return std::to_string(i); }

}  // namespace

// ---------------------------------------------------------------- CausalSystem

CausalSystem::CausalSystem(std::vector<std::string> labels, std::vector<double> priors,
                           std::map<std::string, std::vector<double>> likelihoods)
    : labels_(std::move(labels)), priors_(std::move(priors)), likelihoods_(std::move(likelihoods)) {
    if (labels_.empty()) throw Error(ErrorKind::InvalidArgument, "causal system has no causes");
    if (labels_.size() != priors_.size())
        throw Error(ErrorKind::InvalidArgument, "labels and priors differ in length");

    std::set<std::string> seen;
    for (const auto& l : labels_)
        if (!seen.insert(l).second)
            throw Error(ErrorKind::InvalidArgument, "duplicate cause label '" + l + "'");

    double sum = 0.0;
    for (std::size_t i = 0; i < priors_.size(); ++i) {
        if (!is_probability(priors_[i]))
            throw Error(ErrorKind::InvalidArgument,
                        "prior of cause '" + labels_[i] + "' is not in [0,1]", i);
        sum += priors_[i];
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance)
        throw Error(ErrorKind::InvalidArgument,
                    "priors sum to " + std::to_string(sum) + ", expected 1");

    for (const auto& [event, values] : likelihoods_) {
        if (values.size() != labels_.size())
            throw Error(ErrorKind::InvalidArgument,
                        "event '" + event + "' has " + std::to_string(values.size()) +
                            " likelihoods for " + std::to_string(labels_.size()) + " causes");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!is_probability(values[i]))
                throw Error(ErrorKind::InvalidArgument,
                            "likelihood of event '" + event + "' under cause '" + labels_[i] +
                                "' is not in [0,1]",
                            i);
    }
}

CausalSystem CausalSystem::from_json(const nlohmann::json& j) {
    try {
        std::vector<std::string> labels;
        std::vector<double> priors;
        for (const auto& c : j.at("causes")) {
            labels.push_back(c.at("label").get<std::string>());
            priors.push_back(c.at("prior").get<double>());
        }
        std::map<std::string, std::vector<double>> events;
        if (j.contains("events"))
            for (const auto& [name, values] : j.at("events").items())
                events.emplace(name, values.get<std::vector<double>>());
        return CausalSystem(std::move(labels), std::move(priors), std::move(events));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseFailure, std::string("malformed causal system: ") + e.what());
    }
}

nlohmann::json CausalSystem::to_json() const {
    nlohmann::json causes = nlohmann::json::array();
    for (std::size_t i = 0; i < size(); ++i)
        causes.push_back({{"label", labels_[i]}, {"prior", priors_[i]}});
    nlohmann::json events = nlohmann::json::object();
    for (const auto& [name, values] : likelihoods_) events[name] = values;
    return {{"causes", causes}, {"events", events}};
}

std::size_t CausalSystem::index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw Error(ErrorKind::InvalidArgument, "no cause labelled '" + label + "'");
    return static_cast<std::size_t>(it - labels_.begin());
}

const std::vector<double>& CausalSystem::likelihoods(const std::string& event) const {
    auto it = likelihoods_.find(event);
    if (it == likelihoods_.end())
        throw Error(ErrorKind::UnknownEvent, "event '" + event + "' is not registered");
    return it->second;
}

CausalSystem CausalSystem::with_priors(std::vector<double> priors) const {
    return CausalSystem(labels_, std::move(priors), likelihoods_);
}

// ---------------------------------------------------------------- EvidenceItem

EvidenceItem::EvidenceItem(std::string event_label, double h_num, double h_den)
    : label_(std::move(event_label)), h_num_(h_num), h_den_(h_den) {
    if (!is_probability(h_num) || !is_probability(h_den))
        throw Error(ErrorKind::InvalidArgument,
                    "likelihoods of '" + label_ + "' must lie in [0,1]");
    if (h_num == 0.0 && h_den == 0.0)
        throw Error(ErrorKind::UndefinedFactor,
                    "event '" + label_ + "' is impossible under both hypotheses");
}

// ---------------------------------------------------------------- OddsState

OddsState::OddsState(std::string numerator_label, std::string denominator_label, double odds)
    : num_(std::move(numerator_label)), den_(std::move(denominator_label)), odds_(odds) {
    if (std::isnan(odds) || odds < 0.0)
        throw Error(ErrorKind::InvalidArgument, "odds must be non-negative");
    log_odds_ = safe_log(odds);
}

OddsState OddsState::from_log(std::string numerator_label, std::string denominator_label,
                              double log_odds) {
    if (std::isnan(log_odds)) throw Error(ErrorKind::IndeterminateOdds, "log odds is NaN");
    OddsState s;
    s.num_ = std::move(numerator_label);
    s.den_ = std::move(denominator_label);
    s.log_odds_ = log_odds;
    s.odds_ = std::exp(log_odds);
    return s;
}

double OddsState::probability() const noexcept {
    if (std::isinf(odds_)) return 1.0;
    // 1 / (1 + 1/odds) keeps precision for large finite odds.
    if (odds_ > 1.0) return 1.0 / (1.0 + 1.0 / odds_);
    return odds_ / (1.0 + odds_);
}

// ---------------------------------------------------------------- operations

std::vector<double> posterior_over_causes(const CausalSystem& system, const std::string& event) {
    const auto& lik = system.likelihoods(event);
    const auto& pri = system.priors();
    std::vector<double> post(system.size());
    double denom = 0.0;
    for (std::size_t i = 0; i < post.size(); ++i) {
        post[i] = lik[i] * pri[i];
        denom += post[i];
    }
    if (!(denom > 0.0))
        throw Error(ErrorKind::InconsistentEvidence,
                    "event '" + event + "' has zero probability under every cause");
    for (auto& p : post) p /= denom;
    return post;
}

double bayes_factor(const EvidenceItem& item) {
    if (item.h_den() == 0.0) return kInf;
    return item.h_num() / item.h_den();
}

double log_bayes_factor(const EvidenceItem& item) {
    return safe_log(item.h_num()) - safe_log(item.h_den());
}

OddsState update_odds(const OddsState& prior, const EvidenceItem& item) {
    const double lf = log_bayes_factor(item);
    const double lo = prior.log_odds();
    if ((std::isinf(lo) || std::isinf(lf)) && std::isnan(lo + lf))
        throw Error(ErrorKind::IndeterminateOdds,
                    "evidence '" + item.event_label() + "' multiplies infinite odds by zero");
    return OddsState::from_log(prior.numerator_label(), prior.denominator_label(), lo + lf);
}

OddsState sequential_update(const OddsState& prior, std::span<const EvidenceItem> items) {
    // Track whether the running product is 0, finite or infinite so that a
    // 0 x inf clash is reported at the item where it first occurs.
    double state = prior.log_odds();
    std::vector<double> finite_logs;
    finite_logs.reserve(items.size());
    for (std::size_t k = 0; k < items.size(); ++k) {
        const double lf = log_bayes_factor(items[k]);
        if (std::isinf(lf)) {
            if (std::isinf(state) && (state > 0) != (lf > 0))
                throw Error(ErrorKind::IndeterminateOdds,
                            "evidence item " + fmt_index(k) + " ('" + items[k].event_label() +
                                "') multiplies infinite odds by zero",
                            k);
            state = lf;
        } else {
            finite_logs.push_back(lf);
        }
    }
    if (std::isinf(state))
        return OddsState::from_log(prior.numerator_label(), prior.denominator_label(), state);

    std::sort(finite_logs.begin(), finite_logs.end());
    double acc = prior.log_odds();
    for (double lf : finite_logs) acc += lf;
    return OddsState::from_log(prior.numerator_label(), prior.denominator_label(), acc);
}

OddsState odds_from_posteriors(const CausalSystem& system, const std::string& event, std::size_t i,
                               std::size_t j) {
    if (i >= system.size() || j >= system.size())
        throw Error(ErrorKind::InvalidArgument, "cause index out of range");
    // Validates the event and the normalizing denominator.
    (void)posterior_over_causes(system, event);
    const auto& labels = system.labels();
    if (i == j) return OddsState(labels[i], labels[j], 1.0);

    const auto& lik = system.likelihoods(event);
    if (lik[i] == 0.0 && lik[j] == 0.0)
        throw Error(ErrorKind::IndeterminateOdds,
                    "both causes have zero posterior probability");

    // (h_i / h_j) * (P_i / P_j): the normalizer cancels, and equal priors
    // leave the Bayes factor untouched.
    const EvidenceItem item = evidence_for(system, event, i, j);
    const OddsState prior = prior_odds(system, i, j);
    const double factor = bayes_factor(item);
    const double po = prior.odds();
    if ((factor == 0.0 && std::isinf(po)) || (std::isinf(factor) && po == 0.0))
        throw Error(ErrorKind::IndeterminateOdds,
                    "both causes have zero posterior probability");
    return OddsState(labels[i], labels[j], factor * po);
}

OddsState prior_odds(const CausalSystem& system, std::size_t i, std::size_t j) {
    if (i >= system.size() || j >= system.size())
        throw Error(ErrorKind::InvalidArgument, "cause index out of range");
    const double pi = system.priors()[i];
    const double pj = system.priors()[j];
    if (pi == 0.0 && pj == 0.0)
        throw Error(ErrorKind::IndeterminateOdds, "both causes have zero prior probability");
    const double odds = (i == j) ? 1.0 : (pj == 0.0 ? kInf : pi / pj);
    return OddsState(system.labels()[i], system.labels()[j], odds);
}

EvidenceItem evidence_for(const CausalSystem& system, const std::string& event, std::size_t i,
                          std::size_t j) {
    const auto& lik = system.likelihoods(event);
    if (i >= lik.size() || j >= lik.size())
        throw Error(ErrorKind::InvalidArgument, "cause index out of range");
    return EvidenceItem(event, lik[i], lik[j]);
}

double binomial_log_pmf(int trials, int successes, double p) {
    if (trials < 0 || successes < 0 || successes > trials)
        throw Error(ErrorKind::InvalidArgument, "binomial requires 0 <= successes <= trials");
    if (!is_probability(p)) throw Error(ErrorKind::InvalidArgument, "binomial p must lie in [0,1]");
    const int failures = trials - successes;
    const double log_choose = std::lgamma(trials + 1.0) - std::lgamma(successes + 1.0) -
                              std::lgamma(failures + 1.0);
    const double ls = successes == 0 ? 0.0 : successes * safe_log(p);
    const double lf = failures == 0 ? 0.0 : failures * std::log1p(-p);
    return log_choose + ls + lf;
}

double binomial_pmf(int trials, int successes, double p) {
    return std::exp(binomial_log_pmf(trials, successes, p));
}

}  // namespace gauss
