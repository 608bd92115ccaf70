#include "abq/selftest.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "abq/extensions.hpp"
#include "abq/fields.hpp"
#include "abq/forms.hpp"
#include "abq/greens.hpp"
#include "abq/io.hpp"
#include "abq/quadrature.hpp"
#include "abq/specfun.hpp"
#include "abq/spectral.hpp"

namespace abq::selftest {

namespace {

using Check = std::function<bool()>;

bool run_bundle(std::ostream& log, const char* name, const Check& body) {
    bool ok = false;
    std::string note;
    try {
        ok = body();
    } catch (const std::exception& e) {
        ok = false;
        note = std::string(" (") + e.what() + ")";
    }
    log << (ok ? "[ok]   " : "[FAIL] ") << name << note << "\n";
    return ok;
}

double uni(std::mt19937& g, double a, double b) {
    return a + (b - a) * (static_cast<double>(g()) / 4294967296.0);
}

bool specfun_bundle() {
    using namespace specfun;
    for (int i = 1; i <= 19; ++i) {
        double x = i / 20.0;
        double lhs = gamma_fn(x) * gamma_fn(1.0 - x);
        double rhs = kPi / sinpi(x);
        if (std::abs(lhs - rhs) > 1e-10 * std::abs(rhs)) return false;
    }
    auto k_half = [](double x) { return std::sqrt(kPi / (2.0 * x)) * std::exp(-x); };
    if (std::abs(bessel_k(0.5, 1.0) - k_half(1.0)) > 1e-12 * k_half(1.0)) return false;
    if (std::abs(bessel_k(1.5, 2.0) - k_half(2.0) * 1.5) > 1e-12) return false;
    for (double nu : {0.2, 0.5, 0.8}) {
        for (double x = 1.9; x <= 2.6; x += 0.1) {
            double a = detail::bessel_k_series(nu, x);
            double b = detail::bessel_k_cf2(nu, x);
            if (std::abs(a - b) > 1e-9 * std::abs(b)) return false;
        }
    }
    for (double nu : {0.6, 0.8}) {
        double lim = gamma_fn(nu) * std::pow(2.0, nu - 1.0);
        if (std::abs(std::pow(1e-6, nu) * bessel_k(nu, 1e-6) - lim) > 1e-6 * lim) return false;
    }
    std::mt19937 gen(11);
    for (int i = 0; i < 20; ++i) {
        double nu = uni(gen, 0.1, 0.9), x = uni(gen, 0.1, 8.0);
        double km = bessel_k(1.0 - nu, x);
        double k0 = bessel_k(nu, x);
        double kp = km + 2.0 * nu / x * k0;
        if (!(kp * km - k0 * k0 > 0.0)) return false;
    }
    return true;
}

bool fields_bundle() {
    using namespace fields;
    for (double raw : {0.4, 2.7, -0.3, 1.5}) {
        auto fp = reduce_flux(raw);
        if (!(fp.alpha > 0.0 && fp.alpha < 1.0)) return false;
        if (std::abs(fp.reconstruct_raw() - raw) > 1e-12) return false;
    }
    auto f = PerturbationField::homogeneous_capped(1.0, 5.0);
    std::mt19937 gen(13);
    for (int i = 0; i < 25; ++i) {
        Vec2 x{uni(gen, -7.0, 7.0), uni(gen, -7.0, 7.0)};
        if (norm(x) < 0.05) continue;
        if (std::abs(divergence_fd(f, x, 1e-4)) > 1e-6 * (1.0 + 2.5)) return false;
        double rr = uni(gen, 1e-3, 1.0);
        Vec2 p = from_polar(rr, uni(gen, 0.0, 2.0 * kPi));
        if (norm(f.eval(p)) / rr > f.lipschitz_bound() * (1.0 + 1e-12)) return false;
    }
    Cutoff chi(1.0, 2.0);
    if (chi.deriv(1.0) != 0.0 || chi.deriv(2.0) != 0.0) return false;
    if (std::abs(chi.second(1.0 + 1e-9) - chi.second(1.0 - 1e-9)) > 1e-6) return false;
    RecoveryProfile eta(0.25);
    if (std::abs(eta.value(0.25) - std::pow(0.5, 0.25)) > 1e-12) return false;
    if (eta.value(2.0) != 1.0) return false;
    for (int i = 0; i <= 50; ++i) {
        double r = 0.5 + 0.5 * i / 50.0;
        if (std::abs(eta.deriv(r)) > 0.5 + 1e-12) return false;
    }
    auto wave = [](double, double th) { return std::polar(1.0, th); };
    if (std::abs(angular_average(wave, 1.0, 16)) > 1e-13) return false;
    return true;
}

bool greens_bundle() {
    using namespace greens;
    for (double alpha : {0.3, 0.7}) {
        for (int k : {0, -1}) {
            for (double lam : {0.5, 2.0}) {
                GreenFunction g(k, alpha, lam);
                double q = green_norm_quadrature(g, 1e-8);
                double c = green_norm_closed(g);
                if (std::abs(q - c) > 1e-7 * c) return false;
                if (defect_residual(g, 0.7) > 1e-7) return false;
                if (defect_residual(g, 2.0) > 1e-7) return false;
            }
            GreenFunction g1(k, alpha, 1.0);
            if (defect_residual(g1, 1.0, 0.1) < 1e-2) return false;
        }
    }
    // asymptotic remainder slope for alpha = 0.5, k = 0
    GreenFunction g(0, 0.5, 1.0);
    std::vector<double> lx, ly;
    for (int e = 7; e <= 13; ++e) {
        double r = std::pow(2.0, -e);
        double d = std::abs(green_eval(g, r, 0.0).real() - green_asymptotic(g, r).real());
        lx.push_back(std::log(r));
        ly.push_back(std::log(d));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double slope = (lx.size() * sxy - sx * sy) / (lx.size() * sxx - sx * sx);
    if (std::abs(slope - 1.5) > 0.05) return false;
    return true;
}

bool forms_bundle() {
    using namespace forms;
    fields::Cutoff chi(1.0, 2.0);
    auto field = fields::PerturbationField::homogeneous_capped(1.0, 5.0);
    auto grid = default_grid(chi);
    XiMatrix xi = xi_matrix(0.4, field, chi, 1.0, grid);
    double herm = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) herm = std::max(herm, std::abs(xi.xi[a][b] - std::conj(xi.xi[b][a])));
    if (herm > 10.0 * xi.quad_error + 1e-12) return false;
    if (std::abs(xi.xi[0][1]) > 10.0 * xi.quad_error + 1e-12) return false;

    TrialFunction psi;
    psi.alpha = 0.45;
    psi.lambda = 1.0;
    psi.cutoff = chi;
    psi.field = field;
    psi.q0 = cplx{0.7, 0.2};
    psi.qm1 = cplx{-0.4, 0.5};
    RegularPart rp;
    rp.value = [](double r, double th) -> cplx {
        return std::pow(r, 0.9) * std::exp(-0.5 * r * r) *
               (1.0 + 0.4 * std::polar(1.0, th));
    };
    rp.grad = [](double r, double th) -> PolarVec {
        cplx m0 = std::pow(r, 0.9) * std::exp(-0.5 * r * r);
        cplx m1 = 0.4 * m0 * std::polar(1.0, th);
        cplx dr = (m0 + m1) * (0.9 / r - r);
        return {dr, m1 * cplx(0.0, 1.0) / r};
    };
    rp.vanishing_rate = 0.9;
    psi.phi = rp;
    HermitianCoupling beta{0.8, -0.6, cplx{0.3, -0.2}};
    double q1 = qbeta_eval(psi, beta, grid);
    double q2 = qbeta_eval(change_lambda(psi, 2.0), beta, grid);
    if (std::abs(q1 - q2) > 1e-4 * (1.0 + std::abs(q1))) return false;
    TrialFunction wide = change_cutoff(psi, fields::Cutoff(0.8, 2.5));
    double q3 = qbeta_eval(wide, beta, default_grid(wide));
    if (std::abs(q1 - q3) > 1e-4 * (1.0 + std::abs(q1))) return false;
    TrialFunction fri = psi;
    fri.q0 = fri.qm1 = cplx{0.0, 0.0};
    if (qbeta_eval(fri, beta, grid) != friedrichs_form(fri.phi, fri.alpha, fri.field, grid))
        return false;
    return true;
}

bool extensions_bundle() {
    using namespace ext;
    auto m = extension_matrix({}, 0.5, 1.0);
    if (std::abs(m.m[0][0].real() - kPi * kPi) > 1e-12) return false;
    double s = sinpi(0.3);
    auto r = bound_states({-5.0, -9.0, 0.0}, 0.3, 1e-2, 1e2);
    if (r.states.size() != 2) return false;
    double l0 = std::pow(5.0 * s / (kPi * kPi), 1.0 / 0.6);
    double l1 = std::pow(9.0 * s / (kPi * kPi), 1.0 / 1.4);
    double lo = std::min(l0, l1), hi = std::max(l0, l1);
    if (std::abs(r.states[0].lambda_star - lo) > 1e-10 * lo) return false;
    if (std::abs(r.states[1].lambda_star - hi) > 1e-10 * hi) return false;
    auto fr = bound_states({1e8, 1e8, 0.0}, 0.3, 1e-2, 1e2);
    if (!fr.states.empty()) return false;

    double nu = 0.3;
    auto f = [nu](double rr) -> cplx { return std::pow(rr, nu) * std::exp(-rr); };
    auto t = boundary_trace(f, nullptr, 0, 0.3, geometric_radii(1e-2, 1e-6));
    if (!t.converged) return false;
    if (std::abs(t.value - cplx{2.0 * nu, 0.0}) > 1e-6) return false;
    return true;
}

bool spectral_bundle() {
    using namespace spectral;
    RadialGrid grid(20.0, 500);
    auto s = [](double r) { return 0.5 * r; };
    auto landau = eigenvalues_extrapolated(0, 0.0, s, grid, 2);
    if (std::abs(landau.values[0] - 1.0) > 1e-3) return false;
    if (std::abs(landau.values[1] - 3.0) > 1e-3) return false;
    auto ab = eigenvalues_extrapolated(0, 0.5, s, grid, 1);
    if (std::abs(ab.values[0] - 2.0) > 1e-3) return false;

    RadialGrid res_grid(20.0, 500, 2.5);
    ModeOperator op = assemble_mode_operator(0, 0.4, s, res_grid);
    std::vector<cplx> fv(op.size());
    for (std::size_t i = 0; i < op.size(); ++i)
        fv[i] = std::exp(-0.5 * op.dof_radii[i] * op.dof_radii[i]);
    auto res = resolvent_apply(op, cplx{-1.0, 0.0}, fv);
    if (res.residual > 1e-10) return false;
    return true;
}

bool io_bundle() {
    io::CsvTable t({"a", "b"});
    t.add_row({io::fmt_g17(1.0 / 3.0), io::fmt_g17(2.0)});
    std::string r1 = t.render();
    io::CsvTable t2({"a", "b"});
    t2.add_row({io::fmt_g17(1.0 / 3.0), io::fmt_g17(2.0)});
    return r1 == t2.render() && r1.rfind(io::kCsvVersionTag, 0) == 0;
}

}  // namespace

bool run_all(std::ostream& log) {
    bool ok = true;
    ok &= run_bundle(log, "specfun: reflection/crossover/small-x/convexity", specfun_bundle);
    ok &= run_bundle(log, "fields: flux/gauge/lipschitz/cutoff/eta/averages", fields_bundle);
    ok &= run_bundle(log, "greens: norm identity/defect/asymptotics", greens_bundle);
    ok &= run_bundle(log, "forms: hermiticity/invariance/reduction", forms_bundle);
    ok &= run_bundle(log, "extensions: matrix/bound states/traces", extensions_bundle);
    ok &= run_bundle(log, "spectral: anchors/resolvent residual", spectral_bundle);
    ok &= run_bundle(log, "io: deterministic formatting", io_bundle);
    return ok;
}

}  // namespace abq::selftest
