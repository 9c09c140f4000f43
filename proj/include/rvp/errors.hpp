#pragma once

#include <stdexcept>
#include <string>

namespace rvp {

enum class Errc {
    NotFullDimensional,
    NotReflexive,
    OriginNotInterior,
    EmptyPolytope,
    NonPrimitiveNormal,
    PairingExceedsOne,
    ZeroMeasureBoundary,
    EmptyCloud,
    NotClosed,
    SideMismatch,
    SizeExceeded,
    Infeasible,
    NonConvergence,
    NonPrimitiveM,
    InvalidArgument,
    Parse,
    Io,
};

inline const char* errc_name(Errc e) {
    switch (e) {
    case Errc::NotFullDimensional: return "NotFullDimensional";
    case Errc::NotReflexive: return "NotReflexive";
    case Errc::OriginNotInterior: return "OriginNotInterior";
    case Errc::EmptyPolytope: return "EmptyPolytope";
    case Errc::NonPrimitiveNormal: return "NonPrimitiveNormal";
    case Errc::PairingExceedsOne: return "PairingExceedsOne";
    case Errc::ZeroMeasureBoundary: return "ZeroMeasureBoundary";
    case Errc::EmptyCloud: return "EmptyCloud";
    case Errc::NotClosed: return "NotClosed";
    case Errc::SideMismatch: return "SideMismatch";
    case Errc::SizeExceeded: return "SizeExceeded";
    case Errc::Infeasible: return "Infeasible";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::NonPrimitiveM: return "NonPrimitiveM";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Parse: return "ParseError";
    case Errc::Io: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Carries the source location of a bad instance/config field.
class ParseError : public Error {
public:
    ParseError(std::string source, int line, std::string field, const std::string& msg)
        : Error(Errc::Parse, source + ":" + std::to_string(line) + ": field '" + field + "': " + msg),
          source_(std::move(source)), line_(line), field_(std::move(field)) {}
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }
    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
    int line_;
    std::string field_;
};

// Iteration cap reached; residual is the last marginal error.
class NonConvergence : public Error {
public:
    NonConvergence(double residual, long iterations)
        : Error(Errc::NonConvergence, "iteration cap " + std::to_string(iterations) +
                                          " reached, marginal residual " + std::to_string(residual)),
          residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    long iterations() const noexcept { return iterations_; }

private:
    double residual_;
    long iterations_;
};

} // namespace rvp
