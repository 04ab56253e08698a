#include "relkin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "relkin/error.hpp"

namespace relkin {

Rule1D gauss_legendre(int n, double a, double b) {
    if (n < 1) throw Error(Errc::InvalidInput, "gauss_legendre: n < 1");
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) { p1 = x; p0 = 1.0; }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[i] = mid - half * x;
        r.x[n - 1 - i] = mid + half * x;
        r.w[i] = r.w[n - 1 - i] = w * half;
    }
    if (n % 2 == 1) r.x[n / 2] = mid;
    return r;
}

Rule1D composite_gauss_legendre(const std::vector<double>& breaks, int n) {
    Rule1D out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        Rule1D r = gauss_legendre(n, breaks[i], breaks[i + 1]);
        out.x.insert(out.x.end(), r.x.begin(), r.x.end());
        out.w.insert(out.w.end(), r.w.begin(), r.w.end());
    }
    return out;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double rk = fc * kWgk[7], rg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = h * kXgk[j];
        double s = f(c - dx) + f(c + dx);
        rk += kWgk[j] * s;
        if (j % 2 == 1) rg += kWg[j / 2] * s;
    }
    return {a, b, rk * h, std::abs((rk - rg) * h)};
}

}  // namespace

AdaptiveResult gauss_kronrod(const std::function<double(double)>& f, const std::vector<double>& breaks,
                             double rel_tol, double abs_tol, int max_subdivisions) {
    std::priority_queue<Panel> heap;
    AdaptiveResult res;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        heap.push(gk15(f, breaks[i], breaks[i + 1]));
        res.evaluations += 15;
    }
    for (int it = 0;; ++it) {
        // fixed-order summation for reproducibility
        std::vector<Panel> all;
        std::priority_queue<Panel> copy = heap;
        while (!copy.empty()) { all.push_back(copy.top()); copy.pop(); }
        std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
        double v = 0.0, e = 0.0;
        for (const auto& p : all) { v += p.value; e += p.err; }
        res.value = v;
        res.abs_err = e;
        if (e <= std::max(abs_tol, rel_tol * std::abs(v))) { res.converged = true; return res; }
        if (it >= max_subdivisions) return res;
        Panel worst = heap.top();
        heap.pop();
        double m = 0.5 * (worst.a + worst.b);
        heap.push(gk15(f, worst.a, m));
        heap.push(gk15(f, m, worst.b));
        res.evaluations += 30;
    }
}

}  // namespace relkin
