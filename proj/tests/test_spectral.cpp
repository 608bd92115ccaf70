#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "abq/spectral.hpp"
#include "oracles.hpp"

using namespace abq;
using namespace abq::spectral;

namespace {

std::function<double(double)> homogeneous_s(double b) {
    return [b](double r) { return 0.5 * b * r; };
}

forms::RegularPart gaussian_psi0() {
    forms::RegularPart p;
    p.value = [](double r, double) -> cplx { return std::exp(-0.5 * r * r); };
    p.grad = [](double r, double) -> PolarVec {
        return {-r * std::exp(-0.5 * r * r), 0.0};
    };
    p.vanishing_rate = 0.0;
    return p;
}

}  // namespace

TEST_CASE("radial grid: grading and validation") {
    RadialGrid g(20.0, 400);
    CHECK(g.nodes.size() == 400);
    CHECK(g.nodes.front() <= 20.0 * 1e-4);
    CHECK(g.nodes.back() == doctest::Approx(20.0));
    for (std::size_t i = 1; i < g.nodes.size(); ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
    CHECK_THROWS_AS(RadialGrid(20.0, 100), domain_error);
    CHECK_THROWS_AS(RadialGrid(20.0, 400, 1.0), domain_error);  // too shallow
}

TEST_CASE("free disk: lowest Dirichlet mode matches the Bessel-zero oracle") {
    RadialGrid grid(20.0, 500);
    auto res = eigenvalues_extrapolated(0, 0.0, nullptr, grid, 1);
    double j01 = oracles::j0_first_zero();
    double want = (j01 / 20.0) * (j01 / 20.0);
    CHECK(std::abs(res.values[0] - want) <= 1e-5 * want);
    CHECK_FALSE(res.coarse_warning);
}

TEST_CASE("mode potential: homogeneous-field formula reduces to the expanded form") {
    // alpha=0.5, k=0, s=Br/2, B=1: (0.5 + r^2/2)^2/r^2 = 0.25/r^2 + B(k+alpha) + r^2/4
    double alpha = 0.5;
    auto s = homogeneous_s(1.0);
    for (double r : {0.3, 1.0, 2.7}) {
        double ka = 0.0 + alpha;
        double t = ka + r * s(r);
        double v = t * t / (r * r);
        CHECK(v == doctest::Approx(0.25 / (r * r) + 0.5 + 0.25 * r * r).epsilon(1e-14));
    }
}

TEST_CASE("Landau anchor: alpha = 0 modes k in {0,-1,-2} give (2n+1)B") {
    RadialGrid grid(20.0, 700);
    for (int k : {0, -1, -2}) {
        auto res = eigenvalues_extrapolated(k, 0.0, homogeneous_s(1.0), grid, 3);
        for (int n = 0; n < 3; ++n) {
            CHECK(std::abs(res.values[n] - (2.0 * n + 1.0)) <= 1e-3);
        }
    }
}

TEST_CASE("AB + homogeneous field: oscillator reduction levels") {
    RadialGrid grid(20.0, 700);
    for (double alpha : {0.3, 0.5}) {
        for (int k : {0, -1}) {
            double nu = std::abs(k + alpha);
            auto res = eigenvalues_extrapolated(k, alpha, homogeneous_s(1.0), grid, 2);
            for (int n = 0; n < 2; ++n) {
                double want = 2.0 * n + nu + (k + alpha) + 1.0;
                CHECK(std::abs(res.values[n] - want) <= 1e-3);
            }
        }
    }
}

TEST_CASE("discrete self-convergence: fitted order >= 1.8") {
    auto ev = [&](int n) {
        RadialGrid g(20.0, n);
        ModeOperator op = assemble_mode_operator(0, 0.4, homogeneous_s(1.0), g);
        return eigenvalues(op, 1)[0];
    };
    double e1 = ev(300), e2 = ev(600), e3 = ev(1200);
    double order = std::log2(std::abs(e1 - e2) / std::abs(e2 - e3));
    CHECK(order >= 1.8);
    CHECK(order <= 2.6);
}

TEST_CASE("assembled operator: symmetric by construction, finite entries") {
    RadialGrid grid(15.0, 300);
    ModeOperator op = assemble_mode_operator(-1, 0.35, homogeneous_s(0.7), grid);
    CHECK(op.asymmetry() <= 1e-13);
    for (double d : op.diag) CHECK(std::isfinite(d));
    for (double o : op.off) CHECK(std::isfinite(o));
    for (double m : op.mass) CHECK(m > 0.0);
    CHECK_FALSE(op.has_origin_dof);
    ModeOperator reg = assemble_mode_operator(0, 0.0, homogeneous_s(0.7), grid);
    CHECK(reg.has_origin_dof);
}

TEST_CASE("resolvent: eigenvector identity and residual contract") {
    // grading 3: the representable-residual floor eps*max|T_ii w_i| stays
    // well under the contract on this grid
    RadialGrid grid(20.0, 400, 3.0);
    ModeOperator op = assemble_mode_operator(0, 0.4, homogeneous_s(1.0), grid);
    double e0 = eigenvalues(op, 1)[0];
    std::vector<double> f = eigenvector(op, e0);
    std::vector<cplx> fc(f.begin(), f.end());
    auto res = resolvent_apply(op, cplx{-1.0, 0.0}, fc);
    CHECK(res.residual <= 1e-10);
    double scale = e0 + 1.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        worst = std::max(worst, std::abs(res.u[i] - f[i] / scale));
    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    CHECK(worst <= 1e-7 * fmax);

    // arbitrary right-hand side still meets the residual contract
    std::vector<cplx> g(op.size());
    for (std::size_t i = 0; i < op.size(); ++i)
        g[i] = std::exp(-0.5 * op.dof_radii[i] * op.dof_radii[i]);
    auto res2 = resolvent_apply(op, cplx{-1.0, 0.0}, g);
    CHECK(res2.residual <= 1e-10);

    CHECK_THROWS_AS(resolvent_apply(op, cplx{0.5, 0.0}, g), domain_error);
}

TEST_CASE("resolvent convergence toward the vanishing-flux operator") {
    // grading 6 keeps the origin-layer discretization floor well below the
    // continuum alpha-rate over the tested range
    RadialGrid grid(20.0, 800, 6.0);
    ModeOperator limit = assemble_mode_operator(0, 0.0, nullptr, grid);
    auto f = [](double r) { return std::exp(-0.5 * r * r); };
    std::vector<double> errs;
    for (double alpha : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
        ModeOperator op = assemble_mode_operator(0, alpha, nullptr, grid);
        errs.push_back(resolvent_difference(op, limit, cplx{-1.0, 0.0}, f));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] < errs[i - 1]);
    CHECK(errs.back() <= errs.front() / 4.0);
}

TEST_CASE("gamma recovery study: gap decay, bound, telescopic identity") {
    auto psi0 = gaussian_psi0();
    std::vector<double> alphas{0.2, 0.1, 0.05, 0.025, 0.0125};
    auto study = gamma_recovery_study(psi0, alphas, fields::PerturbationField::zero());
    CHECK(study.h1_sane);
    CHECK(study.q_zero == doctest::Approx(oracles::kPi).epsilon(1e-8));
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const auto& row = study.rows[i];
        CHECK(row.a_norm2 <= row.a_bound);
        CHECK(row.tele_residual <= 1e-8 * (1.0 + std::abs(row.q_alpha)));
        // lower-bound inequality at the level of computed values
        CHECK(row.q_alpha >= row.q_zero - 1e-6 * (1.0 + row.q_zero));
        if (i > 0) {
            CHECK(row.gap < study.rows[i - 1].gap);
            CHECK(row.a_norm2 < study.rows[i - 1].a_norm2);
            CHECK(row.h1_gap < study.rows[i - 1].h1_gap);
        }
    }
    CHECK(study.rows.back().gap <= study.rows.front().gap / 4.0);
}

TEST_CASE("gamma recovery study: works under a bounded azimuthal field") {
    auto psi0 = gaussian_psi0();
    auto field = fields::PerturbationField::homogeneous_capped(0.5, 4.0);
    auto study = gamma_recovery_study(psi0, {0.1, 0.05, 0.025}, field);
    for (std::size_t i = 1; i < study.rows.size(); ++i)
        CHECK(study.rows[i].gap < study.rows[i - 1].gap);
    // unbounded fields are rejected by the hypothesis check
    CHECK_THROWS_AS(
        gamma_recovery_study(psi0, {0.1}, fields::PerturbationField::homogeneous(0.5)),
        domain_error);
}

TEST_CASE("a-term divergence probe: log divergence without the recovery profile") {
    auto probe = a_term_divergence_probe(gaussian_psi0(), 0.1);
    CHECK(probe.divergent);

    forms::RegularPart vanishing;
    vanishing.value = [](double r, double) -> cplx { return r * std::exp(-r * r); };
    vanishing.grad = [](double r, double) -> PolarVec {
        return {(1.0 - 2.0 * r * r) * std::exp(-r * r), 0.0};
    };
    vanishing.vanishing_rate = 1.0;
    auto probe2 = a_term_divergence_probe(vanishing, 0.1);
    CHECK_FALSE(probe2.divergent);
}

TEST_CASE("sobolev weight norm: finiteness and ordering") {
    auto g = gaussian_psi0();
    double vg = sobolev_weight_norm(g);
    CHECK(std::isfinite(vg));
    CHECK(vg > 0.0);

    forms::RegularPart damped;
    damped.value = [](double r, double) -> cplx { return r * std::exp(-r * r); };
    damped.vanishing_rate = 1.0;
    double vd = sobolev_weight_norm(damped);
    CHECK(vd < vg);

    CHECK(sobolev_weight_norm(forms::zero_regular_part()) == 0.0);
}
