#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sphanova {

enum class Errc {
    DimensionMismatch,
    NotUnit,
    NotRotation,
    CollinearInput,
    NotSymmetric,
    NotPositive,
    NotMonotone,
    InvalidModel,
    QuadratureFailure,
    DegenerateMean,
    ZeroCentralSequence,
    NoSignChange,
    DegenerateGroup,
    DomainError,
    InternalConsistency,
    MixedDimensions,
    TooFewGroups,
    NonUnitRow,
    ParseError,
    InvalidConfig,
};

constexpr std::string_view to_string(Errc c) {
    switch (c) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotUnit: return "NotUnit";
    case Errc::NotRotation: return "NotRotation";
    case Errc::CollinearInput: return "CollinearInput";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotPositive: return "NotPositive";
    case Errc::NotMonotone: return "NotMonotone";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::DegenerateMean: return "DegenerateMean";
    case Errc::ZeroCentralSequence: return "ZeroCentralSequence";
    case Errc::NoSignChange: return "NoSignChange";
    case Errc::DegenerateGroup: return "DegenerateGroup";
    case Errc::DomainError: return "DomainError";
    case Errc::InternalConsistency: return "InternalConsistency";
    case Errc::MixedDimensions: return "MixedDimensions";
    case Errc::TooFewGroups: return "TooFewGroups";
    case Errc::NonUnitRow: return "NonUnitRow";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

// Every failure in the library surfaces as this exception. `index` carries
// the offending group or row when one exists.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what), index_(index) {}

    Errc code() const noexcept { return code_; }
    /// Message without the error-code prefix.
    const std::string& detail() const noexcept { return detail_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    Errc code_;
    std::string detail_;
    std::optional<std::size_t> index_;
};

} // namespace sphanova
