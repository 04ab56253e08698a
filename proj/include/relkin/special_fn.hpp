#pragma once

namespace relkin {

enum class BesselMethod { IntegralQuadrature, AsymptoticSeries };

/// K_j(z) together with the exponentially scaled value e^z K_j(z), which stays
/// representable when K_j itself underflows (z above ~700).
struct BesselResult {
    double value = 0.0;
    double scaled = 0.0;
    BesselMethod method = BesselMethod::IntegralQuadrature;
    double est_rel_err = 0.0;
};

inline constexpr double kBesselCrossover = 30.0;
inline constexpr double kBesselDefaultTol = 1e-10;

/// Modified Bessel function of the second kind, integer order j >= 0, z > 0.
BesselResult bessel_k(int j, double z, double tol = kBesselDefaultTol);

/// Quadrature branch only (valid for any z > 0).
BesselResult bessel_k_quadrature(int j, double z, double tol = kBesselDefaultTol);

/// Asymptotic-series branch only; throws NonConvergent if the certified
/// remainder bound cannot reach tol.
BesselResult bessel_k_series(int j, double z, double tol = kBesselDefaultTol);

/// e^z sqrt(2z/pi) K_j(z) - 1, without cancellation on the series branch.
double bessel_k_unit_minus_one(int j, double z, double tol = kBesselDefaultTol);

/// K_3(z)/K_2(z).
double bessel_ratio_32(double z);
/// K_3(z)/K_2(z) - 1 without cancellation at large z.
double bessel_ratio_32_minus_one(double z);

/// I_0(u) for u >= 0.
double bessel_i0(double u);

/// e^{-u} I_0(u) for u >= 0.
double bessel_i0_scaled(double u);

}  // namespace relkin
