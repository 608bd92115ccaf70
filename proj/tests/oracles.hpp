// Test-only oracles, kept independent of the library implementation paths:
// integral representations, brute-force series, adaptive Simpson, finite
// differences, and a Bessel-J0 root finder for the Dirichlet anchor.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// ---- adaptive Simpson (deliberately a different rule family than the
// library's Gauss-Kronrod panels) ----
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth, long& budget) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    budget -= 2;
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    // out of depth or budget: the corrected estimate is the best available
    if (depth <= 0 || budget <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int depth = 48) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    long budget = 4000000;
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth, budget);
}

// ---- K_nu by its integral representation ----
// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt
inline double bessel_k_integral(double nu, double x, double tol = 1e-13) {
    // truncate where x cosh T >= x + 70 (integrand below ~1e-30 of the peak)
    double T = std::acosh(1.0 + 70.0 / x);
    auto f = [nu, x](double t) { return std::exp(-x * std::cosh(t)) * std::cosh(nu * t); };
    return integrate(f, 0.0, T, tol * std::exp(-x), 64);
}

// ---- Gamma oracles ----
// Stirling series at a shifted argument; different family than Lanczos.
inline double gamma_stirling(double x) {
    if (x <= 0.0 && x == std::floor(x)) throw std::runtime_error("gamma oracle: pole");
    if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_stirling(1.0 - x));
    double shift = 0.0;
    double z = x;
    while (z < 12.0) {
        shift += std::log(z);
        z += 1.0;
    }
    static const double b[8] = {1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680,
                                1.0 / 1188, -691.0 / 360360, 1.0 / 156, -3617.0 / 122400};
    double series = 0.0, zp = z;
    for (int n = 0; n < 8; ++n) {
        series += b[n] / zp;
        zp *= z * z;
    }
    double lg = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series;
    return std::exp(lg - shift);
}

// 50-term Euler product limit; coarse by construction (O(1/n) truncation).
inline double gamma_euler_product(double x, int n = 50) {
    double v = std::pow(static_cast<double>(n), x) / x;
    for (int k = 1; k <= n; ++k) v *= k / (x + k);
    return v;
}

// ---- finite differences ----
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double central_diff4(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

inline double second_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// ---- Bessel J0 and its first zero (series + bisection) ----
inline double bessel_j0_series(double x) {
    double q = -0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 60; ++m) {
        term *= q / (static_cast<double>(m) * m);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

inline double j0_first_zero() {
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (bessel_j0_series(lo) * bessel_j0_series(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// ---- least squares slope of y vs x ----
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// deterministic uniform in [a,b) from raw mt19937 draws
template <class Gen>
inline double uniform(Gen& gen, double a, double b) {
    return a + (b - a) * (static_cast<double>(gen()) / 4294967296.0);
}

}  // namespace oracles
