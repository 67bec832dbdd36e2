#ifndef LSPADE_ERROR_HPP
#define LSPADE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace lspade
{
/// Failure categories raised by the library. Each maps onto one contract
/// violation or numerical breakdown; the CLI turns them into exit codes.
enum class ErrorKind
{
    NonHermitianInput,
    NoConvergence,
    DegenerateLeadingCoefficient,
    DimensionMismatch,
    QuadratureNotConverged,
    DuplicatePoles,
    LengthMismatch,
    PoleEvaluation,
    CenterOnPole,
    ZeroPolynomial,
    NotNormalized,
    ConstantPolynomial,
    InsufficientTaylorLength,
    RhoOverflow,
    InvalidParameters,
    ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind)
    {
    case ErrorKind::NonHermitianInput: return "NonHermitianInput";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::DuplicatePoles: return "DuplicatePoles";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::PoleEvaluation: return "PoleEvaluation";
    case ErrorKind::CenterOnPole: return "CenterOnPole";
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::ConstantPolynomial: return "ConstantPolynomial";
    case ErrorKind::InsufficientTaylorLength: return "InsufficientTaylorLength";
    case ErrorKind::RhoOverflow: return "RhoOverflow";
    case ErrorKind::InvalidParameters: return "InvalidParameters";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}
} // namespace lspade

#endif // LSPADE_ERROR_HPP
