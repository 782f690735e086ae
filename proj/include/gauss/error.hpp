#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gauss {

enum class ErrorKind {
    InvalidArgument,
    UnknownEvent,
    InconsistentEvidence,
    UndefinedFactor,
    IndeterminateOdds,
    ImpossibleEvent,
    UndefinedRatio,
    InvertedInterval,
    InvalidPrediction,
    SyntaxError,
    UnknownFunction,
    UnboundName,
    AmbiguousBinding,
    DomainError,
    DegeneratePosterior,
    UnknownAxis,
    ParseFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library. `index` carries the offending
// item / record / node where one applies.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(what), kind_(kind), index_(index) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> index_;
};

}  // namespace gauss
