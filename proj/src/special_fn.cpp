#include "relkin/special_fn.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "relkin/error.hpp"
#include "relkin/quadrature.hpp"

namespace relkin {

namespace {

void check_args(int j, double z, double tol) {
    if (j < 0) throw Error(Errc::InvalidInput, "bessel_k: negative order");
    if (!(z > 0.0) || !std::isfinite(z)) throw Error(Errc::InvalidInput, "bessel_k: z must be positive and finite");
    if (!(tol > 1e-14 && tol < 1e-2)) throw Error(Errc::InvalidInput, "bessel_k: tol outside (1e-14, 1e-2)");
}

struct SeriesSum {
    double sum_minus_one = 0.0;  // sum_{1<=m<n} A_m z^-m
    double bound = std::numeric_limits<double>::infinity();
    int order = 0;
};

// Truncation order n minimises the certified remainder bound.
SeriesSum asymptotic_sum(int j, double z) {
    const double mu = 4.0 * j * j;
    std::vector<double> terms;  // terms[m] = A_m z^-m
    std::vector<double> bounds;
    double t = 1.0;
    terms.push_back(t);
    bounds.push_back(std::numeric_limits<double>::infinity());
    for (int m = 1; m <= 80; ++m) {
        double k = 2.0 * m - 1.0;
        t *= (mu - k * k) / (8.0 * m * z);
        terms.push_back(t);
        double factor = (j <= m + 0.5) ? 1.0 : 2.0 * std::exp((j * j - 0.25) / z);
        bounds.push_back(std::abs(t) * factor);
        if (m > 2 * j + 2 && std::abs(t) > std::abs(terms[m - 1])) break;
    }
    SeriesSum best;
    for (std::size_t n = 1; n < bounds.size(); ++n) {
        if (bounds[n] < best.bound) {
            best.bound = bounds[n];
            best.order = static_cast<int>(n);
        }
    }
    for (int m = best.order - 1; m >= 1; --m) best.sum_minus_one += terms[m];
    return best;
}

}  // namespace

BesselResult bessel_k_series(int j, double z, double tol) {
    check_args(j, z, tol);
    SeriesSum s = asymptotic_sum(j, z);
    double sum = 1.0 + s.sum_minus_one;
    double rel = s.bound / std::abs(sum);
    if (!(rel <= tol)) throw Error(Errc::NonConvergent, "bessel_k: asymptotic series cannot certify tolerance");
    BesselResult r;
    r.method = BesselMethod::AsymptoticSeries;
    r.scaled = std::sqrt(std::numbers::pi / (2.0 * z)) * sum;
    r.value = r.scaled * std::exp(-z);
    r.est_rel_err = rel;
    return r;
}

BesselResult bessel_k_quadrature(int j, double z, double tol) {
    check_args(j, z, tol);
    // s = 1 + u^2/z maps the integral definition to
    // e^z K_j(z) = 2^{1-j} sqrt(pi) / (Gamma(j+1/2) sqrt(z)) * int_0^inf u^{2j} (2 + u^2/z)^{j-1/2} e^{-u^2} du
    const double jm = j - 0.5;
    auto f = [j, jm, z](double u) {
        double u2 = u * u;
        return std::pow(u, 2 * j) * std::pow(2.0 + u2 / z, jm) * std::exp(-u2);
    };
    double upper = 10.0 + std::sqrt(4.0 * j + 1.0);
    std::vector<double> breaks;
    for (double b = 0.0; b < upper; b += 1.0) breaks.push_back(b);
    breaks.push_back(upper);
    AdaptiveResult a = gauss_kronrod(f, breaks, 0.1 * tol);
    double pref = std::pow(2.0, 1.0 - j) * std::sqrt(std::numbers::pi) / (std::tgamma(j + 0.5) * std::sqrt(z));
    BesselResult r;
    r.method = BesselMethod::IntegralQuadrature;
    r.scaled = pref * a.value;
    r.value = r.scaled * std::exp(-z);
    r.est_rel_err = a.abs_err / std::abs(a.value);
    if (!a.converged || !(r.est_rel_err <= tol))
        throw Error(Errc::NonConvergent, "bessel_k: quadrature did not reach tolerance");
    return r;
}

BesselResult bessel_k(int j, double z, double tol) {
    check_args(j, z, tol);
    if (z >= kBesselCrossover) {
        try {
            return bessel_k_series(j, z, tol);
        } catch (const Error&) {
            return bessel_k_quadrature(j, z, tol);
        }
    }
    try {
        return bessel_k_quadrature(j, z, tol);
    } catch (const Error&) {
        return bessel_k_series(j, z, tol);
    }
}

double bessel_k_unit_minus_one(int j, double z, double tol) {
    check_args(j, z, tol);
    if (z >= kBesselCrossover) {
        SeriesSum s = asymptotic_sum(j, z);
        if (s.bound / (1.0 + s.sum_minus_one) <= tol) return s.sum_minus_one;
    }
    BesselResult r = bessel_k_quadrature(j, z, tol);
    return r.scaled * std::sqrt(2.0 * z / std::numbers::pi) - 1.0;
}

double bessel_ratio_32(double z) {
    if (!(z > 0.0)) throw Error(Errc::InvalidInput, "bessel_ratio_32: z must be positive");
    // Shared prefactor e^{-z} sqrt(pi/2z) cancels in the ratio of scaled values.
    if (z >= kBesselCrossover) {
        SeriesSum s3 = asymptotic_sum(3, z), s2 = asymptotic_sum(2, z);
        double a3 = 1.0 + s3.sum_minus_one, a2 = 1.0 + s2.sum_minus_one;
        if (s3.bound / a3 <= kBesselDefaultTol && s2.bound / a2 <= kBesselDefaultTol) return a3 / a2;
    }
    return bessel_k(3, z).scaled / bessel_k(2, z).scaled;
}

double bessel_ratio_32_minus_one(double z) {
    if (!(z > 0.0)) throw Error(Errc::InvalidInput, "bessel_ratio_32: z must be positive");
    if (z >= kBesselCrossover) {
        SeriesSum s3 = asymptotic_sum(3, z), s2 = asymptotic_sum(2, z);
        double a2 = 1.0 + s2.sum_minus_one;
        if (s3.bound / (1.0 + s3.sum_minus_one) <= kBesselDefaultTol && s2.bound / a2 <= kBesselDefaultTol)
            return (s3.sum_minus_one - s2.sum_minus_one) / a2;
    }
    return bessel_ratio_32(z) - 1.0;
}

double bessel_i0_scaled(double u) {
    if (!(u >= 0.0) || !std::isfinite(u)) throw Error(Errc::InvalidInput, "bessel_i0: u must be >= 0");
    if (u <= 25.0) {
        // trapezoid on the periodic integrand converges geometrically
        constexpr int n = 128;
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += std::exp(u * (std::cos(2.0 * std::numbers::pi * k / n) - 1.0));
        return s / n;
    }
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * u);
        if (std::abs(next) > std::abs(term)) break;
        term = next;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * u);
}

double bessel_i0(double u) { return bessel_i0_scaled(u) * std::exp(u); }

}  // namespace relkin
