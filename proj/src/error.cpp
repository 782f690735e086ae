#include "gauss/error.hpp"

namespace gauss {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::UnknownEvent: return "unknown-event";
        case ErrorKind::InconsistentEvidence: return "inconsistent-evidence";
        case ErrorKind::UndefinedFactor: return "undefined-factor";
        case ErrorKind::IndeterminateOdds: return "indeterminate-odds";
        case ErrorKind::ImpossibleEvent: return "impossible-event";
        case ErrorKind::UndefinedRatio: return "undefined-ratio";
        case ErrorKind::InvertedInterval: return "inverted-interval";
        case ErrorKind::InvalidPrediction: return "invalid-prediction";
        case ErrorKind::SyntaxError: return "syntax-error";
        case ErrorKind::UnknownFunction: return "unknown-function";
        case ErrorKind::UnboundName: return "unbound-name";
        case ErrorKind::AmbiguousBinding: return "ambiguous-binding";
        case ErrorKind::DomainError: return "domain-error";
        case ErrorKind::DegeneratePosterior: return "degenerate-posterior";
        case ErrorKind::UnknownAxis: return "unknown-axis";
        case ErrorKind::ParseFailure: return "parse-failure";
    }
    return "unknown";
}

}  // namespace gauss
