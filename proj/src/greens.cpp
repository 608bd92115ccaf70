#include "abq/greens.hpp"

#include <cmath>

#include "abq/quadrature.hpp"
#include "abq/specfun.hpp"

namespace abq::greens {

using specfun::bessel_k;
using specfun::bessel_k_derivative;
using specfun::bessel_k_second_derivative;
using specfun::gamma_fn;

GreenFunction::GreenFunction(int k_, double alpha_, double lambda_)
    : k(k_), alpha(alpha_), lambda(lambda_) {
    if (k != 0 && k != -1)
        throw domain_error("GreenFunction: only k = 0 and k = -1 solve the defect equation");
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("GreenFunction: alpha in (0,1)");
    if (!(lambda > 0.0)) throw domain_error("GreenFunction: lambda > 0");
    nu = std::abs(k + alpha);
}

cplx green_eval(const GreenFunction& g, double r, double theta) {
    if (!(r > 0.0)) throw domain_error("green_eval: divergent at r = 0");
    double rad = green_radial(g, r);
    return rad * std::polar(1.0, g.k * theta);
}

double green_radial(const GreenFunction& g, double r) {
    if (!(r > 0.0)) throw domain_error("green_radial: requires r > 0");
    return std::pow(g.lambda, g.nu) * bessel_k(g.nu, g.lambda * r);
}

double green_radial_deriv(const GreenFunction& g, double r) {
    return std::pow(g.lambda, g.nu + 1.0) * bessel_k_derivative(g.nu, g.lambda * r);
}

double green_radial_second(const GreenFunction& g, double r) {
    return std::pow(g.lambda, g.nu + 2.0) * bessel_k_second_derivative(g.nu, g.lambda * r);
}

double green_norm_closed(const GreenFunction& g) {
    return kPi * kPi * g.nu / sinpi(g.alpha) * std::pow(g.lambda, 2.0 * g.nu - 2.0);
}

double green_norm_quadrature(const GreenFunction& g, double rel_tol) {
    if (!(rel_tol >= 1e-10)) throw domain_error("green_norm_quadrature: rel_tol >= 1e-10");
    const double nu = g.nu, lam = g.lambda;
    const double l2nu = std::pow(lam, 2.0 * nu);

    // analytic head on [0, eps]: K_nu(x)^2 x ~ c1^2 x^{1-2nu} + 2 c1 c2 x + c2^2 x^{1+2nu},
    // relative accuracy O((lam*eps)^2)
    const double eps = 1e-5 / lam;
    const double c1 = gamma_fn(nu) * std::pow(2.0, nu - 1.0);
    const double c2 = gamma_fn(-nu) * std::pow(2.0, -1.0 - nu);
    const double X = lam * eps;
    double head_x = c1 * c1 * std::pow(X, 2.0 - 2.0 * nu) / (2.0 - 2.0 * nu) +
                    c1 * c2 * X * X +
                    c2 * c2 * std::pow(X, 2.0 + 2.0 * nu) / (2.0 + 2.0 * nu);
    double head = head_x * l2nu / (lam * lam);

    auto integrand = [&](double r) {
        double k = bessel_k(nu, lam * r);
        return l2nu * k * k * r;
    };

    // split at the kernel crossover r = 2/lambda; exponential tail cut at 25/lambda
    const double mid = 2.0 / lam;
    const double tail_cut = 25.0 / lam;
    const double scale = kPi * kPi * nu / sinpi(g.alpha) * std::pow(lam, 2.0 * nu - 2.0);
    quad::Estimate body1 =
        quad::adaptive_gk(integrand, eps, mid, 0.25 * rel_tol, 1e-4 * rel_tol * scale, 60000);
    quad::Estimate body2 =
        quad::adaptive_gk(integrand, mid, tail_cut, 0.25 * rel_tol, 1e-4 * rel_tol * scale, 60000);

    // K_nu(x) <= sqrt(pi/2x) e^{-x} (1 + c/x) beyond the cut, so the remainder
    // is below pi/4 lam^{2nu-2} e^{-2 lam T} up to the same envelope factor
    double tail = 0.25 * kPi * std::pow(lam, 2.0 * nu - 2.0) *
                  std::exp(-2.0 * lam * tail_cut) * (1.0 + 1.0 / (lam * tail_cut));

    return 2.0 * kPi * (head + body1.value + body2.value + tail);
}

cplx green_asymptotic(const GreenFunction& g, double r) {
    if (!(r > 0.0)) throw domain_error("green_asymptotic: requires r > 0");
    if (!(g.lambda * r < 1.0))
        throw domain_error("green_asymptotic: expansion valid only for lambda*r < 1");
    double c1 = gamma_fn(g.nu) * std::pow(2.0, g.nu - 1.0);
    double c2 = gamma_fn(-g.nu) * std::pow(2.0, -1.0 - g.nu);
    double v = c1 * std::pow(r, -g.nu) + c2 * std::pow(g.lambda, 2.0 * g.nu) * std::pow(r, g.nu);
    return {v, 0.0};
}

namespace {

struct DiffSeries {
    double value;
    double deriv;
};

// lambda^nu K_nu(lambda r) = C [ (r/2)^{-nu} S-(q) - (r/2)^{nu} lam^{2nu} S+(q) ],
// q = (lambda r / 2)^2, C = pi / (2 sin(pi nu)), S+-(q) = sum q^m/(m! Gamma(m+1+-nu)).
// In the difference over two lambdas the m = 0 term of the S- half drops out
// exactly; everything else is summed without cancellation.
DiffSeries lambda_diff_series(double nu, double l1, double l2, double r) {
    const double c = kPi / (2.0 * sinpi(nu));
    const double q1 = 0.25 * l1 * l1 * r * r;
    const double q2 = 0.25 * l2 * l2 * r * r;
    const double p1 = std::pow(l1, 2.0 * nu);
    const double p2 = std::pow(l2, 2.0 * nu);
    double gm = gamma_fn(2.0 - nu);        // Gamma(m+1-nu) at m = 1
    double gp = gamma_fn(1.0 + nu);        // Gamma(m+1+nu) at m = 0
    double gp_run = gp * (1.0 + nu);       // Gamma(m+1+nu) at m = 1
    double fac = 1.0;                      // m!
    double q1m = 1.0, q2m = 1.0;           // q^{m-1}

    double a = 0.0, da = 0.0;              // S-(q1)-S-(q2) and d/dr, from m = 1
    double b = (p1 - p2) / gp;             // m = 0 term of the plus half
    double db = 0.0;
    for (int m = 1; m < 40; ++m) {
        fac *= m;
        double ta = (q1m * q1 - q2m * q2) / (fac * gm);
        a += ta;
        da += m * (q1m * l1 * l1 - q2m * l2 * l2) * (0.5 * r) / (fac * gm);
        double tb = (p1 * q1m * q1 - p2 * q2m * q2) / (fac * gp_run);
        b += tb;
        db += m * (p1 * q1m * l1 * l1 - p2 * q2m * l2 * l2) * (0.5 * r) / (fac * gp_run);
        if (std::abs(ta) < 1e-18 * (1.0 + std::abs(a)) &&
            std::abs(tb) < 1e-18 * (1.0 + std::abs(b)))
            break;
        gm *= (m + 1.0 - nu);
        gp_run *= (m + 1.0 + nu);
        q1m *= q1;
        q2m *= q2;
    }
    double rm = std::pow(0.5 * r, -nu);
    double rp = std::pow(0.5 * r, nu);
    double value = c * (rm * a - rp * b);
    double deriv =
        c * (rm * (da - nu / r * a) - rp * (db + nu / r * b));
    return {value, deriv};
}

void check_diff_pair(const GreenFunction& a, const GreenFunction& b) {
    if (a.k != b.k || a.alpha != b.alpha)
        throw domain_error("green lambda diff: requires equal k and alpha");
}

}  // namespace

double green_radial_lambda_diff(const GreenFunction& a, const GreenFunction& b, double r) {
    check_diff_pair(a, b);
    if (!(r > 0.0)) throw domain_error("green_radial_lambda_diff: requires r > 0");
    double xmax = std::max(a.lambda, b.lambda) * r;
    if (xmax >= 0.5) return green_radial(a, r) - green_radial(b, r);
    return lambda_diff_series(a.nu, a.lambda, b.lambda, r).value;
}

double green_radial_lambda_diff_deriv(const GreenFunction& a, const GreenFunction& b, double r) {
    check_diff_pair(a, b);
    if (!(r > 0.0)) throw domain_error("green_radial_lambda_diff_deriv: requires r > 0");
    double xmax = std::max(a.lambda, b.lambda) * r;
    if (xmax >= 0.5) return green_radial_deriv(a, r) - green_radial_deriv(b, r);
    return lambda_diff_series(a.nu, a.lambda, b.lambda, r).deriv;
}

double defect_residual(const GreenFunction& g, double r, double coeff_shift) {
    if (!(r > 0.0)) throw domain_error("defect_residual: requires r > 0");
    double f = green_radial(g, r);
    double fp = green_radial_deriv(g, r);
    double fpp = green_radial_second(g, r);
    double k_alpha_sq = (g.k + g.alpha) * (g.k + g.alpha) + coeff_shift;
    double t1 = -fpp;
    double t2 = -fp / r;
    double t3 = k_alpha_sq / (r * r) * f;
    double t4 = g.lambda * g.lambda * f;
    double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
    return std::abs(t1 + t2 + t3 + t4) / scale;
}

}  // namespace abq::greens
