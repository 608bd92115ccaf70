#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "abq/specfun.hpp"
#include "oracles.hpp"

using abq::specfun::bessel_k;
using abq::specfun::bessel_k_derivative;
using abq::specfun::bessel_k_second_derivative;
using abq::specfun::gamma_fn;

namespace {
double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }
}  // namespace

TEST_CASE("gamma: closed-form anchors") {
    CHECK(rel_err(gamma_fn(0.5), std::sqrt(oracles::kPi)) < 1e-13);
    CHECK(rel_err(gamma_fn(1.0), 1.0) < 1e-14);
    CHECK(rel_err(gamma_fn(5.0), 24.0) < 1e-13);
    // reflection product at x = 0.3 against pi/sin(pi x)
    double lhs = gamma_fn(0.3) * gamma_fn(0.7);
    double rhs = oracles::kPi / std::sin(0.3 * oracles::kPi);
    CHECK(rel_err(lhs, rhs) < 1e-12);
    CHECK(rhs == doctest::Approx(3.88322208).epsilon(1e-7));
}

TEST_CASE("gamma: reflection identity on a grid in (0,1)") {
    for (int i = 1; i <= 39; ++i) {
        double x = i / 40.0;
        double lhs = gamma_fn(x) * gamma_fn(1.0 - x);
        double rhs = oracles::kPi / abq::sinpi(x);
        CHECK(std::abs(lhs - rhs) / std::abs(rhs) <= 1e-10);
    }
}

TEST_CASE("gamma: independent oracles") {
    for (double x : {0.1, 0.3, 0.85, 1.4, 3.3, 7.5, -0.3, -1.7}) {
        CHECK(rel_err(gamma_fn(x), oracles::gamma_stirling(x)) < 1e-11);
    }
    // 50-term Euler product is a coarse sanity oracle (truncation is O(1/n))
    for (double x : {0.3, 0.7, 1.9}) {
        CHECK(rel_err(gamma_fn(x), oracles::gamma_euler_product(x, 50)) < 1e-1);
    }
}

TEST_CASE("gamma: poles rejected") {
    CHECK_THROWS_AS(gamma_fn(0.0), abq::domain_error);
    CHECK_THROWS_AS(gamma_fn(-3.0), abq::domain_error);
}

TEST_CASE("bessel_k: half-integer closed forms") {
    auto k_half = [](double x) { return std::sqrt(oracles::kPi / (2.0 * x)) * std::exp(-x); };
    CHECK(rel_err(bessel_k(0.5, 1.0), 0.4610685055) < 5e-9);
    CHECK(rel_err(bessel_k(0.5, 1.0), k_half(1.0)) < 1e-12);
    CHECK(rel_err(bessel_k(0.5, 2.0), k_half(2.0)) < 1e-12);
    CHECK(bessel_k(0.5, 2.0) == doctest::Approx(0.1199377).epsilon(1e-6));
    // K_{3/2}(x) = sqrt(pi/2x) e^{-x} (1 + 1/x): exercises the (1,2) recurrence
    for (double x : {0.7, 1.0, 3.0, 9.0}) {
        CHECK(rel_err(bessel_k(1.5, x), k_half(x) * (1.0 + 1.0 / x)) < 1e-12);
    }
}

TEST_CASE("bessel_k: integral-representation oracle over random (nu,x)") {
    std::mt19937 gen(9001);
    for (int i = 0; i < 120; ++i) {
        double nu = oracles::uniform(gen, 0.05, 0.95);
        double x = oracles::uniform(gen, 0.01, 20.0);
        double want = oracles::bessel_k_integral(nu, x);
        CHECK(rel_err(bessel_k(nu, x), want) <= 1e-10);
    }
    // frozen spot value from the oracle (nu=0.3, x=2.5)
    double frozen = oracles::bessel_k_integral(0.3, 2.5);
    CHECK(rel_err(bessel_k(0.3, 2.5), frozen) < 1e-11);
}

TEST_CASE("bessel_k: series and large-x routes agree on the crossover band") {
    for (double nu : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (double x = 1.8; x <= 3.01; x += 0.1) {
            double a = abq::specfun::detail::bessel_k_series(nu, x);
            double b = abq::specfun::detail::bessel_k_cf2(nu, x);
            CHECK(std::abs(a - b) / std::abs(b) < 1e-9);
        }
    }
}

TEST_CASE("bessel_k: positivity and monotone decay") {
    std::mt19937 gen(4242);
    for (int i = 0; i < 50; ++i) {
        double nu = oracles::uniform(gen, 0.05, 1.9);
        if (std::abs(nu - 1.0) < 1e-3) continue;
        double x = oracles::uniform(gen, 0.05, 15.0);
        double v = bessel_k(nu, x);
        CHECK(v > 0.0);
        CHECK(bessel_k(nu, x * 1.05) < v);
    }
}

TEST_CASE("bessel_k: small-x law x^nu K_nu -> Gamma(nu) 2^{nu-1}") {
    // The deviation from the limit is Gamma(-nu) 2^{-1-nu} x^{2nu} + O(x^2),
    // so the plain 1e-6 check only makes sense once 2nu >= 1.
    double x = 1e-6;
    for (double nu : {0.5, 0.65, 0.8, 0.95}) {
        double lim = gamma_fn(nu) * std::pow(2.0, nu - 1.0);
        CHECK(rel_err(std::pow(x, nu) * bessel_k(nu, x), lim) < 1e-6);
    }
    for (double nu : {0.1, 0.2, 0.35}) {
        double lim = gamma_fn(nu) * std::pow(2.0, nu - 1.0);
        double corr = std::abs(gamma_fn(-nu)) * std::pow(2.0, -1.0 - nu) * std::pow(x, 2.0 * nu);
        double dev = std::abs(std::pow(x, nu) * bessel_k(nu, x) - lim);
        CHECK(dev <= 1.5 * corr + 1e-10);
    }
}

TEST_CASE("bessel_k: order log-convexity (Wronskian-style)") {
    std::mt19937 gen(77);
    for (int i = 0; i < 40; ++i) {
        double nu = oracles::uniform(gen, 0.1, 0.9);
        double x = oracles::uniform(gen, 0.1, 10.0);
        double km = bessel_k(1.0 - nu, x);  // K_{nu-1} by symmetry
        double k0 = bessel_k(nu, x);
        double kp = km + (2.0 * nu / x) * k0;
        CHECK(kp * km - k0 * k0 > 0.0);
    }
}

TEST_CASE("bessel_k: domain errors") {
    CHECK_THROWS_AS(bessel_k(0.5, 0.0), abq::domain_error);
    CHECK_THROWS_AS(bessel_k(0.5, -1.0), abq::domain_error);
    CHECK_THROWS_AS(bessel_k(2.5, 1.0), abq::domain_error);
    CHECK_THROWS_AS(bessel_k(1.0, 1.0), abq::domain_error);
    CHECK_THROWS_AS(bessel_k_derivative(0.5, -2.0), abq::domain_error);
}

TEST_CASE("bessel_k_derivative: closed form, finite differences, sign") {
    // K_{1/2}' at 1: differentiate sqrt(pi/2x)e^{-x}
    double want = std::sqrt(oracles::kPi / 2.0) * (-1.5) * std::exp(-1.0);
    CHECK(rel_err(bessel_k_derivative(0.5, 1.0), want) < 1e-12);
    CHECK(bessel_k_derivative(0.5, 1.0) == doctest::Approx(-0.6916028).epsilon(1e-6));

    auto f = [](double x) { return bessel_k(0.3, x); };
    double fd = oracles::central_diff(f, 1.0, 1e-5);
    CHECK(std::abs(bessel_k_derivative(0.3, 1.0) - fd) <= 1e-6);

    std::mt19937 gen(13);
    for (int i = 0; i < 30; ++i) {
        double nu = oracles::uniform(gen, 0.05, 0.95);
        double x = oracles::uniform(gen, 0.1, 12.0);
        CHECK(bessel_k_derivative(nu, x) < 0.0);
    }
}

TEST_CASE("bessel_k_second_derivative: finite-difference cross-check") {
    for (double nu : {0.25, 0.6}) {
        for (double x : {0.8, 2.2, 5.0}) {
            auto f = [nu](double t) { return bessel_k(nu, t); };
            double fd = oracles::second_diff(f, x, 1e-4);
            CHECK(std::abs(bessel_k_second_derivative(nu, x) - fd) <
                  1e-5 * (1.0 + std::abs(fd)));
        }
    }
}
