#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "abq/extensions.hpp"
#include "abq/specfun.hpp"
#include "oracles.hpp"

using namespace abq;
using namespace abq::ext;
using forms::HermitianCoupling;

TEST_CASE("extension_matrix: closed-form assembly and Hermiticity") {
    auto m1 = extension_matrix({}, 0.5, 1.0);
    CHECK(m1.m[0][0].real() == doctest::Approx(oracles::kPi * oracles::kPi).epsilon(1e-14));
    CHECK(m1.m[1][1].real() == doctest::Approx(oracles::kPi * oracles::kPi).epsilon(1e-14));
    CHECK(m1.m[0][1] == cplx{0.0, 0.0});

    double s = std::sin(0.3 * oracles::kPi);
    auto m2 = extension_matrix({}, 0.3, 2.0);
    CHECK(m2.m[0][0].real() ==
          doctest::Approx(oracles::kPi * oracles::kPi * std::pow(2.0, 0.6) / s).epsilon(1e-14));
    CHECK(m2.m[1][1].real() ==
          doctest::Approx(oracles::kPi * oracles::kPi * std::pow(2.0, 1.4) / s).epsilon(1e-14));

    HermitianCoupling beta{1.5, -0.7, cplx{0.3, 0.8}};
    auto m3 = extension_matrix(beta, 0.4, 1.7);
    CHECK(m3.m[0][1] == std::conj(m3.m[1][0]));
    CHECK(std::abs(m3.det().imag()) <= 1e-14 * std::abs(m3.det()));
    // diagonal increments strictly increase with lambda
    auto m4 = extension_matrix(beta, 0.4, 2.0);
    CHECK(m4.m[0][0].real() > m3.m[0][0].real());
    CHECK(m4.m[1][1].real() > m3.m[1][1].real());
}

TEST_CASE("bound_states: determinant closed forms") {
    const double pi2 = oracles::kPi * oracles::kPi;
    {
        // alpha = 1/2, beta = diag(-pi^2, +pi^2): det = pi^4 (lambda^2 - 1)
        auto r = bound_states({-pi2, pi2, 0.0}, 0.5, 0.1, 10.0);
        REQUIRE(r.states.size() == 1);
        CHECK(r.states[0].lambda_star == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(r.states[0].energy == doctest::Approx(-1.0).epsilon(1e-10));
    }
    {
        // off-diagonal coupling: lambda* = |b| sin(pi alpha)/pi^2
        double alpha = 0.25;
        double s = std::sin(oracles::kPi * alpha);
        cplx b = std::polar(pi2 / s, 0.6);
        auto r = bound_states({0.0, 0.0, b}, alpha, 0.1, 10.0);
        REQUIRE(r.states.size() == 1);
        CHECK(r.states[0].lambda_star == doctest::Approx(1.0).epsilon(1e-10));
    }
    {
        // positive-definite beta: no roots at all
        auto r = bound_states({1.0, 2.0, 0.0}, 0.35, 0.1, 10.0);
        CHECK(r.states.empty());
        CHECK(r.bracket_warning);
    }
}

TEST_CASE("bound_states: diagonal closed form lambda* = (-b sin(pi a)/pi^2)^{1/2nu}") {
    struct Case {
        double alpha, b0, b1;
    } cases[] = {{0.3, -3.0, -7.0}, {0.5, -5.0, -20.0}, {0.65, -2.5, -12.0}, {0.75, -10.0, -4.0}};
    for (auto c : cases) {
        double s = std::sin(oracles::kPi * c.alpha);
        auto r = bound_states({c.b0, c.b1, 0.0}, c.alpha, 1e-2, 1e2);
        double l0 = std::pow(-c.b0 * s / (oracles::kPi * oracles::kPi), 1.0 / (2.0 * c.alpha));
        double l1 = std::pow(-c.b1 * s / (oracles::kPi * oracles::kPi),
                             1.0 / (2.0 * (1.0 - c.alpha)));
        REQUIRE(r.states.size() == 2);
        double lo = std::min(l0, l1), hi = std::max(l0, l1);
        CHECK(r.states[0].lambda_star == doctest::Approx(lo).epsilon(1e-10));
        CHECK(r.states[1].lambda_star == doctest::Approx(hi).epsilon(1e-10));
        CHECK(r.states[0].energy == doctest::Approx(-lo * lo).epsilon(1e-9));
    }
}

TEST_CASE("bound_states: null vector and Friedrichs limit") {
    HermitianCoupling beta{-8.0, -3.0, cplx{1.2, -0.4}};
    double alpha = 0.4;
    auto r = bound_states(beta, alpha, 1e-2, 1e2);
    REQUIRE(!r.states.empty());
    for (auto st : r.states) {
        auto m = extension_matrix(beta, alpha, st.lambda_star);
        double nm = std::abs(m.m[0][0]) + std::abs(m.m[0][1]) + std::abs(m.m[1][0]) +
                    std::abs(m.m[1][1]);
        CHECK(std::abs(m.det()) <= 1e-10 * nm * nm);
        // null vector from the adjugate
        cplx q0, q1;
        if (std::abs(m.m[0][0]) + std::abs(m.m[0][1]) >
            std::abs(m.m[1][0]) + std::abs(m.m[1][1])) {
            q0 = m.m[0][1];
            q1 = -m.m[0][0];
        } else {
            q0 = m.m[1][1];
            q1 = -m.m[1][0];
        }
        double qn = std::sqrt(std::norm(q0) + std::norm(q1));
        double res = std::sqrt(std::norm(m.m[0][0] * q0 + m.m[0][1] * q1) +
                               std::norm(m.m[1][0] * q0 + m.m[1][1] * q1));
        CHECK(res <= 1e-8 * qn * nm);
    }
    // huge diagonal beta: the singular sector is frozen out
    auto f = bound_states({1e8, 1e8, 0.0}, alpha, 1e-2, 1e2);
    CHECK(f.states.empty());
}

TEST_CASE("boundary_trace: power-law profiles") {
    for (double alpha : {0.3, 0.5}) {
        for (int k : {0, -1}) {
            double nu = std::abs(k + alpha);
            auto grid = geometric_radii(1e-2, 1e-6);
            // f = r^nu g(r), g = exp(-r^2): trace -> 2 nu g(0)
            auto f = [nu](double r) -> cplx { return std::pow(r, nu) * std::exp(-r * r); };
            auto df = [nu](double r) -> cplx {
                return std::pow(r, nu) * std::exp(-r * r) * (nu / r - 2.0 * r);
            };
            auto t = boundary_trace(f, df, k, alpha, grid);
            CHECK(t.converged);
            CHECK(std::abs(t.value - cplx{2.0 * nu, 0.0}) <= 1e-6 * 2.0 * nu);

            // f = r^{nu+2}: trace -> 0
            auto h = [nu](double r) -> cplx { return std::pow(r, nu + 2.0); };
            auto t2 = boundary_trace(h, nullptr, k, alpha, grid);
            CHECK(t2.converged);
            CHECK(std::abs(t2.value) <= 1e-8);
        }
    }
}

TEST_CASE("boundary_trace: Green-function profile hits the subleading coefficient") {
    struct Case {
        double alpha;
        int k;
        double tol;
    } cases[] = {{0.5, 0, 1e-6}, {0.5, -1, 1e-6}, {0.3, 0, 1e-6}, {0.3, -1, 5e-3}};
    for (auto c : cases) {
        greens::GreenFunction g(c.k, c.alpha, 1.3);
        auto f = [&](double r) -> cplx { return greens::green_radial(g, r); };
        auto df = [&](double r) -> cplx { return greens::green_radial_deriv(g, r); };
        auto grid = geometric_radii(1e-2, 1e-7);
        auto t = boundary_trace(f, df, c.k, c.alpha, grid);
        double want = 2.0 * g.nu * specfun::gamma_fn(-g.nu) * std::pow(2.0, -1.0 - g.nu) *
                      std::pow(1.3, 2.0 * g.nu);
        CHECK(std::abs(t.value - cplx{want, 0.0}) <= c.tol * std::abs(want));
    }
}

TEST_CASE("boundary_trace: divergence flag outside the operator domain") {
    double alpha = 0.5;
    // r^{nu/2} is in L^2 but its trace blows up like r^{-nu/2}
    auto f = [](double r) -> cplx { return std::pow(r, 0.25); };
    auto t = boundary_trace(f, nullptr, 0, alpha, geometric_radii(1e-2, 1e-8));
    CHECK_FALSE(t.converged);
}

TEST_CASE("singular_charge: zero on regular profiles, recovers the r^{-nu} weight") {
    double alpha = 0.4, nu = 0.4;
    auto grid = geometric_radii(1e-2, 1e-6);
    auto reg = [nu](double r) -> cplx { return std::pow(r, nu) * std::exp(-r * r); };
    auto t = singular_charge(reg, nullptr, 0, alpha, grid);
    CHECK(t.converged);
    CHECK(std::abs(t.value) <= 1e-8);

    double b = 0.37;
    auto mixed = [nu, b](double r) -> cplx {
        return b * std::pow(r, -nu) + 2.0 * std::pow(r, nu);
    };
    auto t2 = singular_charge(mixed, nullptr, 0, alpha, grid);
    CHECK(t2.converged);
    CHECK(std::abs(t2.value - cplx{b, 0.0}) <= 1e-8 * (1.0 + b));
}

TEST_CASE("charge_solve: trivial, diagonal, and near-singular cases") {
    HermitianCoupling beta{0.4, -0.2, cplx{0.1, 0.05}};
    auto [q0, q1] = charge_solve(beta, 0.35, 1.2, {0.0, 0.0}, {0.0, 0.0});
    CHECK(std::abs(q0) == 0.0);
    CHECK(std::abs(q1) == 0.0);

    HermitianCoupling diag{1.1, 2.3, 0.0};
    double alpha = 0.3, lambda = 0.9;
    cplx t0{0.7, -0.4};
    auto [p0, p1] = charge_solve(diag, alpha, lambda, t0, {0.0, 0.0});
    CHECK(std::abs(p1) == 0.0);
    auto m = extension_matrix(diag, alpha, lambda);
    cplx want = t0 * specfun::gamma_fn(alpha) * std::pow(2.0, alpha - 1.0) / m.m[0][0];
    CHECK(std::abs(p0 - want) <= 1e-12 * std::abs(want));

    // conditioning blows up approaching a determinant root
    const double pi2 = oracles::kPi * oracles::kPi;
    HermitianCoupling sing{-pi2, pi2, 0.0};
    auto near = extension_matrix(sing, 0.5, 1.0 + 1e-9);
    CHECK(near.cond1() >= 1e8);
    CHECK_THROWS_AS(charge_solve(sing, 0.5, 1.0 + 1e-13, {1.0, 0.0}, {0.0, 0.0}),
                    numerics_error);
}

TEST_CASE("hbeta correction: support and the commutator cross-check") {
    forms::TrialFunction psi;
    psi.phi = forms::zero_regular_part();
    psi.alpha = 0.35;
    psi.lambda = 1.2;
    psi.q0 = cplx{0.8, -0.3};
    psi.qm1 = cplx{0.4, 0.9};
    psi.cutoff = fields::Cutoff(1.0, 2.0);
    psi.field = fields::PerturbationField::zero();

    // identically zero inside B_a and outside B_b for S = 0
    CHECK(hbeta_correction_at(psi, 0.5, 0.3) == cplx{0.0, 0.0});
    CHECK(hbeta_correction_at(psi, 2.5, 1.1) == cplx{0.0, 0.0});

    // in the annulus: equals (H + lambda^2)((chi - 1) G) computed by radial
    // finite differences, mode by mode
    for (int idx : {0, 1}) {
        forms::TrialFunction single = psi;
        single.q0 = idx == 0 ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
        single.qm1 = idx == 0 ? cplx{0.0, 0.0} : cplx{1.0, 0.0};
        int k = forms::mode_of(idx);
        greens::GreenFunction g(k, psi.alpha, psi.lambda);
        auto u = [&](double r) {
            return (psi.cutoff.value(r) - 1.0) * greens::green_radial(g, r);
        };
        for (double r : {1.2, 1.5, 1.8}) {
            double h = 1e-5;
            double upp = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
            double up = (u(r + h) - u(r - h)) / (2.0 * h);
            double kan = (k + psi.alpha) * (k + psi.alpha);
            double want =
                -upp - up / r + (kan / (r * r) + psi.lambda * psi.lambda) * u(r);
            cplx got = hbeta_correction_at(single, r, 0.7) * std::polar(1.0, -k * 0.7);
            CHECK(std::abs(got - cplx{want, 0.0}) <= 1e-5 * (1.0 + std::abs(want)));
        }
    }

    // gridded evaluation matches the pointwise values
    auto grid = quad::PolarGrid::standard(4.0, {1.0, 2.0});
    auto field = hbeta_apply_correction(psi, grid);
    std::size_t nt = field.theta.size();
    bool any_nonzero = false;
    for (std::size_t i = 0; i < field.radii.size(); i += 37) {
        for (std::size_t j = 0; j < nt; j += 19) {
            cplx want = hbeta_correction_at(psi, field.radii[i], field.theta[j]);
            CHECK(field.values[i * nt + j] == want);
            if (std::abs(want) > 0.0) any_nonzero = true;
        }
    }
    CHECK(any_nonzero);
}
