#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fle {

enum class Errc {
    InvalidArgument,
    DegenerateWeight,
    PointOutsideDomain,
    GridMismatch,
    WeightNotIntegrable,
    RuleMismatch,
    QuadratureFailure,
    BasisMismatch,
    UnsupportedKind,
    NegativeInput,
    UnsupportedRegime,
    NotConverged,
    TrivialCollapse,
    SingularJacobian,
    AdmissibilityFailure,
    NonpositiveDenominator,
    InvalidChain,
    Io,
};

constexpr std::string_view to_string(Errc e) noexcept
{
    switch (e) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DegenerateWeight: return "DegenerateWeight";
    case Errc::PointOutsideDomain: return "PointOutsideDomain";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::WeightNotIntegrable: return "WeightNotIntegrable";
    case Errc::RuleMismatch: return "RuleMismatch";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::BasisMismatch: return "BasisMismatch";
    case Errc::UnsupportedKind: return "UnsupportedKind";
    case Errc::NegativeInput: return "NegativeInput";
    case Errc::UnsupportedRegime: return "UnsupportedRegime";
    case Errc::NotConverged: return "NotConverged";
    case Errc::TrivialCollapse: return "TrivialCollapse";
    case Errc::SingularJacobian: return "SingularJacobian";
    case Errc::AdmissibilityFailure: return "AdmissibilityFailure";
    case Errc::NonpositiveDenominator: return "NonpositiveDenominator";
    case Errc::InvalidChain: return "InvalidChain";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

/// Library exception carrying a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace fle
