#include "abq/specfun.hpp"

#include <cmath>

namespace abq::specfun {

const KernelConfig& kernel_config() {
    static const KernelConfig cfg{};
    return cfg;
}

namespace {

// Lanczos g = 7, 9 coefficients (double precision set).
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,      -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,    12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6,  1.5056327351493116e-7};

double gamma_positive(double x) {
    // valid for x >= 0.5
    double a = kLanczos[0];
    double t = x + 6.5;
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i - 1.0);
    return std::sqrt(2.0 * kPi) * std::pow(t, x - 0.5) * std::exp(-t) * a;
}

}  // namespace

double gamma_fn(double x) {
    if (!std::isfinite(x)) throw domain_error("gamma_fn: non-finite argument");
    if (x <= 0.0 && x == std::floor(x))
        throw domain_error("gamma_fn: pole at non-positive integer argument");
    if (x >= 0.5) return gamma_positive(x);
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return kPi / (sinpi(x) * gamma_positive(1.0 - x));
}

namespace detail {

double bessel_k_series(double mu, double x) {
    const KernelConfig& cfg = kernel_config();
    // I_{+-mu}(x) = (x/2)^{+-mu} sum_m (x^2/4)^m / (m! Gamma(m+1+-mu))
    const double q = 0.25 * x * x;
    const double lh = std::log(0.5 * x);
    double gp = gamma_fn(1.0 + mu);   // Gamma(m+1+mu), updated in the loop
    double gm = gamma_fn(1.0 - mu);   // Gamma(m+1-mu)
    double fac = 1.0;                 // m!
    double qm = 1.0;                  // q^m
    const double pref_p = std::exp(mu * lh);
    const double pref_m = std::exp(-mu * lh);
    double sum_p = 0.0, sum_m = 0.0;
    for (int m = 0; m < cfg.series_max_terms; ++m) {
        double tp = qm / (fac * gp);
        double tm = qm / (fac * gm);
        sum_p += tp;
        sum_m += tm;
        if (m > 2 && tp < cfg.series_eps * sum_p && tm < cfg.series_eps * sum_m) break;
        gp *= (m + 1.0 + mu);
        gm *= (m + 1.0 - mu);
        fac *= (m + 1.0);
        qm *= q;
    }
    double i_p = pref_p * sum_p;
    double i_m = pref_m * sum_m;
    return kPi * (i_m - i_p) / (2.0 * sinpi(mu));
}

double bessel_k_cf2(double nu, double x) {
    const KernelConfig& cfg = kernel_config();
    // Temme's continued fraction (the dqk-style route in Numerical Recipes'
    // bessik): evaluates K_mu and K_{mu+1} for mu in [-1/2, 1/2].
    const double mu = (nu <= 0.5) ? nu : nu - 1.0;
    const double mu2 = mu * mu;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= cfg.cf2_max_iter; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < cfg.cf2_eps) break;
    }
    if (i > cfg.cf2_max_iter) throw numerics_error("bessel_k_cf2: no convergence");
    h = a1 * h;
    double rkmu = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
    if (nu <= 0.5) return rkmu;
    return rkmu * (mu + x + 0.5 - h) / x;  // K_{mu+1}
}

double bessel_k_base(double mu, double x) {
    // mu strictly inside (0,1)
    const KernelConfig& cfg = kernel_config();
    if (x <= cfg.series_crossover_x) return bessel_k_series(mu, x);
    return bessel_k_cf2(mu, x);
}

}  // namespace detail

double bessel_k(double nu, double x) {
    if (!(x > 0.0)) throw domain_error("bessel_k: requires x > 0");
    if (!(nu > 0.0 && nu < 2.0)) throw domain_error("bessel_k: order must lie in (0,2)");
    if (nu < 1.0) return detail::bessel_k_base(nu, x);
    if (std::abs(nu - 1.0) < 1e-12)
        throw domain_error("bessel_k: order 1 not reachable from the series/recurrence route");
    // K_nu = K_{nu-2} + 2(nu-1)/x K_{nu-1}, with K_{nu-2} = K_{2-nu}.
    return detail::bessel_k_base(2.0 - nu, x) +
           (2.0 * (nu - 1.0) / x) * detail::bessel_k_base(nu - 1.0, x);
}

double bessel_k_derivative(double nu, double x) {
    if (!(x > 0.0)) throw domain_error("bessel_k_derivative: requires x > 0");
    if (!(nu > 0.0 && nu < 1.0))
        throw domain_error("bessel_k_derivative: order must lie in (0,1)");
    return -detail::bessel_k_base(1.0 - nu, x) - (nu / x) * detail::bessel_k_base(nu, x);
}

double bessel_k_second_derivative(double nu, double x) {
    if (!(x > 0.0)) throw domain_error("bessel_k_second_derivative: requires x > 0");
    if (!(nu > 0.0 && nu < 1.0))
        throw domain_error("bessel_k_second_derivative: order must lie in (0,1)");
    return detail::bessel_k_base(nu, x) * (1.0 + nu * (nu + 1.0) / (x * x)) +
           detail::bessel_k_base(1.0 - nu, x) / x;
}

}  // namespace abq::specfun
