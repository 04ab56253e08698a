#include "relkin/error.hpp"

namespace relkin {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::InvalidInput: return "InvalidInput";
        case Errc::NonConvergent: return "NonConvergent";
        case Errc::DegenerateDenominator: return "DegenerateDenominator";
        case Errc::GridTooCoarse: return "GridTooCoarse";
        case Errc::QuadratureUnderResolved: return "QuadratureUnderResolved";
        case Errc::DiagonalSingular: return "DiagonalSingular";
        case Errc::EigSolverFailure: return "EigSolverFailure";
        case Errc::NonFinite: return "NonFinite";
        case Errc::NegativeDensity: return "NegativeDensity";
        case Errc::Blowup: return "Blowup";
        case Errc::GridMismatch: return "GridMismatch";
        case Errc::NonPositiveValue: return "NonPositiveValue";
        case Errc::Config: return "Config";
        case Errc::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace relkin
