#pragma once

// Exact counting model of two hypotheses H, H' and an aggregate "other"
// hypothesis over equiprobable elementary cases. Every probability is a
// ratio of case counts, computed in arbitrary-precision rationals.
//
//               event E   not E
//   H              m        n
//   H'             m'       n'
//   neither        m''      n''

#include <array>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "gauss/hypothesis.hpp"

namespace gauss {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class Hypothesis { H, HPrime, Other };

/// A rational, or +infinity for a ratio with zero denominator.
struct ExtendedRational {
    bool infinite = false;
    Rational value = 0;

    static ExtendedRational ratio(const Rational& num, const Rational& den);
    std::string str() const;
    double to_double() const;
    friend bool operator==(const ExtendedRational&, const ExtendedRational&) = default;
};

class CasePartition {
public:
    CasePartition(std::uint64_t m, std::uint64_t n, std::uint64_t m_p, std::uint64_t n_p,
                  std::uint64_t m_pp, std::uint64_t n_pp);

    /// {"m":..,"n":..,"m'":..,"n'":..,"m''":..,"n''":..}; negative or
    /// non-integer counts are rejected.
    static CasePartition from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    std::uint64_t m() const noexcept { return m_; }
    std::uint64_t n() const noexcept { return n_; }
    std::uint64_t m_p() const noexcept { return m_p_; }
    std::uint64_t n_p() const noexcept { return n_p_; }
    std::uint64_t m_pp() const noexcept { return m_pp_; }
    std::uint64_t n_pp() const noexcept { return n_pp_; }
    Integer total() const;

private:
    std::uint64_t m_, n_, m_p_, n_p_, m_pp_, n_pp_;
};

Rational prior(const CasePartition& p, Hypothesis which);

/// P(E | H) = m/(m+n) or P(E | H') = m'/(m'+n'). `Other` is m''/(m''+n''),
/// and 0 when that row is empty.
Rational likelihood(const CasePartition& p, Hypothesis which);

/// P(H | E) = m/(m+m'+m''), once the not-E cases are discarded.
Rational posterior(const CasePartition& p, Hypothesis which);

/// The six joint probabilities P(E∩H), P(¬E∩H), P(E∩H'), P(¬E∩H'),
/// P(E∩other), P(¬E∩other); they sum to exactly 1.
std::array<Rational, 6> joint_probabilities(const CasePartition& p);

struct TheoremReport {
    bool equal_priors = false;
    ExtendedRational posterior_ratio;   // P(H|E) / P(H'|E)
    ExtendedRational likelihood_ratio;  // h / h'
    ExtendedRational prior_ratio;       // P(H) / P(H')
    Rational general_identity_residual;  // |posterior - likelihood * prior|
};

TheoremReport verify_theorem(const CasePartition& p);

/// Causes "H", "H'", "other" with one event "E". The third cause is kept
/// (with prior 0 when its row is empty) so indices 0 and 1 are always H, H'.
CausalSystem to_causal_system(const CasePartition& p);

}  // namespace gauss
