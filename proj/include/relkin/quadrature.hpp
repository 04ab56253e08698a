#pragma once

#include <functional>
#include <vector>

namespace relkin {

struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;
};

/// Gauss-Legendre rule with n nodes on [a, b].
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Composite Gauss-Legendre rule: n nodes on every panel [breaks[i], breaks[i+1]].
Rule1D composite_gauss_legendre(const std::vector<double>& breaks, int n);

struct AdaptiveResult {
    double value = 0.0;
    double abs_err = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Adaptive Gauss-Kronrod (7/15) integration over the given panels.
/// Panels are bisected until the summed error estimate is below
/// max(abs_tol, rel_tol * |value|).
AdaptiveResult gauss_kronrod(const std::function<double(double)>& f,
                             const std::vector<double>& breaks, double rel_tol,
                             double abs_tol = 0.0, int max_subdivisions = 2000);

}  // namespace relkin
