#pragma once

#include <stdexcept>
#include <string>

namespace relkin {

enum class Errc {
    InvalidInput,
    NonConvergent,
    DegenerateDenominator,
    GridTooCoarse,
    QuadratureUnderResolved,
    DiagonalSingular,
    EigSolverFailure,
    NonFinite,
    NegativeDensity,
    Blowup,
    GridMismatch,
    NonPositiveValue,
    Config,
    Io,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace relkin
