#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "abq/greens.hpp"
#include "abq/quadrature.hpp"
#include "abq/specfun.hpp"
#include "oracles.hpp"

using namespace abq;
using namespace abq::greens;

TEST_CASE("green_eval: half-flux closed forms and phase") {
    GreenFunction g0(0, 0.5, 1.0);
    cplx v = green_eval(g0, 1.0, 0.7);
    CHECK(v.real() == doctest::Approx(0.4610685).epsilon(1e-6));
    CHECK(std::abs(v.imag()) < 1e-15);  // theta-independent for k = 0

    GreenFunction gm(-1, 0.5, 1.0);
    cplx w = green_eval(gm, 1.0, oracles::kPi);
    CHECK(w.real() == doctest::Approx(-0.4610685).epsilon(1e-6));
    CHECK(std::abs(w.imag()) < 1e-12);

    // modulus independent of theta
    for (double th : {0.0, 0.3, 2.2, 5.9}) {
        CHECK(std::abs(green_eval(gm, 0.7, th)) ==
              doctest::Approx(std::abs(green_eval(gm, 0.7, 0.0))).epsilon(1e-14));
    }
    CHECK_THROWS_AS(green_eval(g0, 0.0, 0.0), domain_error);
}

TEST_CASE("green_eval: k=0 spot value against the kernel oracle") {
    GreenFunction g(0, 0.3, 2.0);
    double want = std::pow(2.0, 0.3) * oracles::bessel_k_integral(0.3, 1.0);
    CHECK(green_eval(g, 0.5, 0.0).real() == doctest::Approx(want).epsilon(1e-11));
}

TEST_CASE("green_norm_closed: closed-form identity values") {
    GreenFunction a(0, 0.5, 2.0);
    CHECK(green_norm_closed(a) == doctest::Approx(2.4674011).epsilon(1e-7));
    GreenFunction b(-1, 0.3, 1.0);
    CHECK(green_norm_closed(b) == doctest::Approx(8.53966).epsilon(1e-5));
    // nu symmetry under (k, alpha) -> (-1, 1-alpha)
    for (double al : {0.2, 0.45, 0.8}) {
        GreenFunction s(0, al, 1.0);
        GreenFunction p(-1, 1.0 - al, 1.0);
        CHECK(green_norm_closed(s) == doctest::Approx(green_norm_closed(p)).epsilon(1e-14));
    }
}

TEST_CASE("green_norm_quadrature: agrees with the closed form on the grid") {
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (int k : {0, -1}) {
            for (double lam : {0.5, 1.0, 2.0, 4.0}) {
                GreenFunction g(k, alpha, lam);
                double quad_v = green_norm_quadrature(g, 1e-8);
                double closed = green_norm_closed(g);
                CHECK(std::abs(quad_v - closed) / closed <= 1e-7);
            }
        }
    }
}

TEST_CASE("green_norm_quadrature: lambda scaling") {
    GreenFunction g1(0, 0.35, 1.0);
    GreenFunction g3(0, 0.35, 3.0);
    double ratio = green_norm_quadrature(g3, 1e-9) / green_norm_quadrature(g1, 1e-9);
    CHECK(ratio == doctest::Approx(std::pow(3.0, 2.0 * 0.35 - 2.0)).epsilon(1e-7));
}

TEST_CASE("green_asymptotic: leading coefficient and remainder order") {
    GreenFunction g(0, 0.5, 1.0);
    // leading coefficient Gamma(1/2) 2^{-1/2} = sqrt(pi/2)
    double lead = green_asymptotic(g, 1e-8).real() * std::pow(1e-8, 0.5);
    CHECK(lead == doctest::Approx(std::sqrt(oracles::kPi / 2.0)).epsilon(1e-7));
    CHECK(lead == doctest::Approx(1.2533141).epsilon(1e-6));

    // second coefficient for alpha = 0.3, k = 0: Gamma(-0.3)/2^{1.3} lambda^{0.6}
    GreenFunction h(0, 0.3, 1.7);
    double c2 = specfun::gamma_fn(-0.3) * std::pow(2.0, -1.3) * std::pow(1.7, 0.6);
    double r = 1e-6;
    double sub = green_asymptotic(h, r).real() -
                 specfun::gamma_fn(0.3) * std::pow(2.0, -0.7) * std::pow(r, -0.3);
    CHECK(sub == doctest::Approx(c2 * std::pow(r, 0.3)).epsilon(1e-10));

    // remainder order 2 - nu via a dyadic log-log fit
    for (double alpha : {0.3, 0.5, 0.7}) {
        for (int k : {0, -1}) {
            GreenFunction gg(k, alpha, 1.0);
            std::vector<double> lx, ly;
            for (int e = 7; e <= 14; ++e) {
                double rr = std::pow(2.0, -e);
                double diff = std::abs(green_eval(gg, rr, 0.0).real() -
                                       green_asymptotic(gg, rr).real());
                lx.push_back(std::log(rr));
                ly.push_back(std::log(diff));
            }
            double slope = oracles::fit_slope(lx, ly);
            CHECK(std::abs(slope - (2.0 - gg.nu)) <= 0.05);
        }
    }
    CHECK_THROWS_AS(green_asymptotic(g, 2.0), domain_error);
}

TEST_CASE("defect_residual: satisfied by the implementation, broken by a shift") {
    for (double alpha : {0.3, 0.5, 0.7}) {
        for (int k : {0, -1}) {
            for (double lam : {0.5, 1.0, 2.0}) {
                GreenFunction g(k, alpha, lam);
                for (double r : {0.3, 0.7, 1.0, 2.0, 5.0}) {
                    CHECK(defect_residual(g, r) <= 1e-7);
                }
            }
        }
    }
    GreenFunction g(0, 0.5, 1.0);
    CHECK(defect_residual(g, 1.0) <= 1e-8);
    GreenFunction h(-1, 0.3, 2.0);
    CHECK(defect_residual(h, 0.7) <= 1e-7);
    // negative control (lambda = 1 so the shift is not diluted by lambda^2 terms)
    GreenFunction h1(-1, 0.3, 1.0);
    CHECK(defect_residual(g, 1.0, 0.1) >= 1e-2);
    CHECK(defect_residual(h1, 1.0, 0.1) >= 1e-2);
}

TEST_CASE("radial orthogonality of the two modes against a radial weight") {
    // <G0 | eta G-1> with eta = exp(-r^2), by 2D quadrature
    GreenFunction g0(0, 0.4, 1.0);
    GreenFunction gm(-1, 0.4, 1.0);
    auto grid = quad::PolarGrid::standard(10.0);
    std::vector<double> r0(grid.radii().size()), rm(grid.radii().size());
    for (std::size_t i = 0; i < grid.radii().size(); ++i) {
        r0[i] = green_radial(g0, grid.radii()[i]);
        rm[i] = green_radial(gm, grid.radii()[i]);
    }
    cplx ip = grid.integrate_c([&](std::size_t ir, double r, std::size_t, double th) {
        cplx a = r0[ir];  // k = 0: real
        cplx b = rm[ir] * std::polar(1.0, -th);
        return std::conj(a) * std::exp(-r * r) * b;
    });
    CHECK(std::abs(ip) <= 1e-9);
}
