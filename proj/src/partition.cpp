#include "gauss/partition.hpp"

#include <limits>
#include <stdexcept>

#include "gauss/error.hpp"

namespace gauss {

namespace {

Integer big(std::uint64_t v) { return Integer(v); }

std::uint64_t read_count(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorKind::ParseFailure, std::string("missing count '") + key + "'");
    const auto& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        // Signed JSON integers that are non-negative are already handled above.
        throw Error(ErrorKind::InvalidArgument, std::string("count '") + key + "' is negative");
    }
    throw Error(ErrorKind::ParseFailure, std::string("count '") + key + "' is not an integer");
}

}  // namespace

ExtendedRational ExtendedRational::ratio(const Rational& num, const Rational& den) {
    if (den == 0) {
        if (num == 0) throw Error(ErrorKind::UndefinedRatio, "ratio 0/0 is undefined");
        return ExtendedRational{true, 0};
    }
    return ExtendedRational{false, num / den};
}

std::string ExtendedRational::str() const {
    if (infinite) return "1/0";
    return numerator(value).str() + "/" + denominator(value).str();
}

double ExtendedRational::to_double() const {
    if (infinite) return std::numeric_limits<double>::infinity();
    return value.convert_to<double>();
}

CasePartition::CasePartition(std::uint64_t m, std::uint64_t n, std::uint64_t m_p, std::uint64_t n_p,
                             std::uint64_t m_pp, std::uint64_t n_pp)
    : m_(m), n_(n), m_p_(m_p), n_p_(n_p), m_pp_(m_pp), n_pp_(n_pp) {
    if (big(m) + n == 0)
        throw Error(ErrorKind::InvalidArgument, "hypothesis H has no cases (m + n = 0)");
    if (big(m_p) + n_p == 0)
        throw Error(ErrorKind::InvalidArgument, "hypothesis H' has no cases (m' + n' = 0)");
}

CasePartition CasePartition::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorKind::ParseFailure, "partition must be a JSON object");
    return CasePartition(read_count(j, "m"), read_count(j, "n"), read_count(j, "m'"),
                         read_count(j, "n'"), read_count(j, "m''"), read_count(j, "n''"));
}

nlohmann::json CasePartition::to_json() const {
    return {{"m", m_}, {"n", n_}, {"m'", m_p_}, {"n'", n_p_}, {"m''", m_pp_}, {"n''", n_pp_}};
}

Integer CasePartition::total() const { return big(m_) + n_ + m_p_ + n_p_ + m_pp_ + n_pp_; }

Rational prior(const CasePartition& p, Hypothesis which) {
    const Integer total = p.total();
    switch (which) {
        case Hypothesis::H: return Rational(big(p.m()) + p.n(), total);
        case Hypothesis::HPrime: return Rational(big(p.m_p()) + p.n_p(), total);
        case Hypothesis::Other: return Rational(big(p.m_pp()) + p.n_pp(), total);
    }
    throw std::logic_error("unreachable");
}

Rational likelihood(const CasePartition& p, Hypothesis which) {
    switch (which) {
        case Hypothesis::H: return Rational(big(p.m()), big(p.m()) + p.n());
        case Hypothesis::HPrime: return Rational(big(p.m_p()), big(p.m_p()) + p.n_p());
        case Hypothesis::Other: {
            const Integer row = big(p.m_pp()) + p.n_pp();
            return row == 0 ? Rational(0) : Rational(big(p.m_pp()), row);
        }
    }
    throw std::logic_error("unreachable");
}

Rational posterior(const CasePartition& p, Hypothesis which) {
    const Integer surviving = big(p.m()) + p.m_p() + p.m_pp();
    if (surviving == 0)
        throw Error(ErrorKind::ImpossibleEvent, "event E has no favourable case (m + m' + m'' = 0)");
    switch (which) {
        case Hypothesis::H: return Rational(big(p.m()), surviving);
        case Hypothesis::HPrime: return Rational(big(p.m_p()), surviving);
        case Hypothesis::Other: return Rational(big(p.m_pp()), surviving);
    }
    throw std::logic_error("unreachable");
}

std::array<Rational, 6> joint_probabilities(const CasePartition& p) {
    const Integer t = p.total();
    return {Rational(big(p.m()), t),   Rational(big(p.n()), t),    Rational(big(p.m_p()), t),
            Rational(big(p.n_p()), t), Rational(big(p.m_pp()), t), Rational(big(p.n_pp()), t)};
}

TheoremReport verify_theorem(const CasePartition& p) {
    if (p.m() == 0 && p.m_p() == 0) {
        // Distinguish "E impossible" from "E possible only under the third row".
        (void)posterior(p, Hypothesis::H);
        throw Error(ErrorKind::UndefinedRatio,
                    "m = m' = 0: posterior and likelihood ratios are 0/0");
    }
    TheoremReport r;
    r.equal_priors = (big(p.m()) + p.n()) == (big(p.m_p()) + p.n_p());
    r.posterior_ratio =
        ExtendedRational::ratio(posterior(p, Hypothesis::H), posterior(p, Hypothesis::HPrime));
    r.likelihood_ratio =
        ExtendedRational::ratio(likelihood(p, Hypothesis::H), likelihood(p, Hypothesis::HPrime));
    r.prior_ratio = ExtendedRational::ratio(prior(p, Hypothesis::H), prior(p, Hypothesis::HPrime));

    // Both priors are positive, so the product is infinite exactly when the
    // likelihood ratio is.
    if (r.posterior_ratio.infinite != r.likelihood_ratio.infinite)
        throw std::logic_error("posterior and likelihood ratios disagree on finiteness");
    if (r.posterior_ratio.infinite) {
        r.general_identity_residual = 0;
    } else {
        const Rational diff = r.posterior_ratio.value - r.likelihood_ratio.value * r.prior_ratio.value;
        r.general_identity_residual = diff < 0 ? Rational(-diff) : diff;
    }
    return r;
}

CausalSystem to_causal_system(const CasePartition& p) {
    const auto d = [](const Rational& r) { return r.convert_to<double>(); };
    std::vector<double> priors{d(prior(p, Hypothesis::H)), d(prior(p, Hypothesis::HPrime)),
                               d(prior(p, Hypothesis::Other))};
    std::vector<double> lik{d(likelihood(p, Hypothesis::H)), d(likelihood(p, Hypothesis::HPrime)),
                            d(likelihood(p, Hypothesis::Other))};
    return CausalSystem({"H", "H'", "other"}, std::move(priors), {{"E", std::move(lik)}});
}

}  // namespace gauss
