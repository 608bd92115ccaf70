#include "abq/forms.hpp"

#include <cmath>
#include <vector>

namespace abq::forms {

using fields::Cutoff;
using fields::PerturbationField;
using greens::GreenFunction;
using quad::PolarGrid;

RegularPart zero_regular_part() {
    RegularPart p;
    p.value = nullptr;
    p.vanishing_rate = 1.0;
    return p;
}

PolarVec regular_grad(const RegularPart& phi, double r, double theta) {
    if (phi.empty()) return {};
    if (phi.grad) return phi.grad(r, theta);
    // 4th-order central differences; radial step shrinks near the origin so
    // the stencil stays on r > 0
    double hr = std::min(0.2 * r, 1e-4 * (1.0 + r));
    auto fr = [&](double rr) { return phi.value(rr, theta); };
    cplx dr = (-fr(r + 2 * hr) + 8.0 * fr(r + hr) - 8.0 * fr(r - hr) + fr(r - 2 * hr)) /
              (12.0 * hr);
    double ht = 1e-4;
    auto ft = [&](double tt) { return phi.value(r, tt); };
    cplx dt = (-ft(theta + 2 * ht) + 8.0 * ft(theta + ht) - 8.0 * ft(theta - ht) +
               ft(theta - 2 * ht)) /
              (12.0 * ht);
    return {dr, dt / r};
}

namespace {

constexpr cplx kI{0.0, 1.0};

// Per-grid caches of the Green radial profiles and of the field/cutoff data.
struct ModeCache {
    std::vector<double> val;   // lambda^nu K_nu(lambda r)
    std::vector<double> dval;  // d/dr of the above
};

ModeCache cache_mode(const GreenFunction& g, const std::vector<double>& radii,
                     bool with_deriv) {
    ModeCache c;
    c.val.resize(radii.size());
    if (with_deriv) c.dval.resize(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        c.val[i] = greens::green_radial(g, radii[i]);
        if (with_deriv) c.dval[i] = greens::green_radial_deriv(g, radii[i]);
    }
    return c;
}

struct FieldCache {
    bool azimuthal = true;
    std::vector<double> s_of_r;  // azimuthal profile on the radii
    Vec2 s0{};
    const PerturbationField* field = nullptr;

    // (S - S(0)) in the polar basis at a node
    Vec2 delta_polar(std::size_t ir, double r, double theta) const {
        if (azimuthal) return {0.0, s_of_r[ir]};
        Vec2 sp = field->polar_components(r, theta);
        double c = std::cos(theta), sn = std::sin(theta);
        Vec2 s0p{s0.x * c + s0.y * sn, -s0.x * sn + s0.y * c};
        return {sp.x - s0p.x, sp.y - s0p.y};
    }
};

FieldCache cache_field(const PerturbationField& field, const std::vector<double>& radii) {
    FieldCache fc;
    fc.field = &field;
    fc.s0 = field.s_at_origin();
    fc.azimuthal = field.is_zero() || field.is_azimuthal();
    if (fc.azimuthal) {
        fc.s_of_r.resize(radii.size());
        for (std::size_t i = 0; i < radii.size(); ++i) fc.s_of_r[i] = field.s_of_r(radii[i]);
    }
    return fc;
}

cplx phase_factor(Vec2 s0, double r, double theta) {
    if (s0.x == 0.0 && s0.y == 0.0) return {1.0, 0.0};
    Vec2 x = from_polar(r, theta);
    return std::polar(1.0, -(s0.x * x.x + s0.y * x.y));
}

double friedrichs_on(const RegularPart& phi, double alpha, const FieldCache& fc,
                     const PolarGrid& grid) {
    return grid.integrate([&](std::size_t ir, double r, std::size_t, double th) {
        cplx v = phi.value(r, th);
        PolarVec g = regular_grad(phi, r, th);
        Vec2 sp = fc.azimuthal ? Vec2{0.0, fc.s_of_r[ir]}
                               : fc.field->polar_components(r, th);
        cplx pr = -kI * g.r + sp.x * v;
        cplx pt = -kI * g.t + (alpha / r + sp.y) * v;
        return std::norm(pr) + std::norm(pt);
    });
}

XiMatrix xi_on(double alpha, const FieldCache& fc, const Cutoff& chi, double lambda,
               const PolarGrid& grid) {
    XiMatrix out;
    out.alpha = alpha;
    out.lambda = lambda;
    const auto& radii = grid.radii();
    ModeCache mc[2] = {cache_mode(GreenFunction(0, alpha, lambda), radii, true),
                       cache_mode(GreenFunction(-1, alpha, lambda), radii, true)};
    std::vector<double> chi_v(radii.size()), chi_d(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        chi_v[i] = chi.value(radii[i]);
        chi_d[i] = chi.deriv(radii[i]);
    }
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            int ka = mode_of(a), kb = mode_of(b);
            cplx entry = grid.integrate_c([&](std::size_t ir, double r, std::size_t,
                                              double th) -> cplx {
                if (r >= chi.b) return {0.0, 0.0};
                double cv = chi_v[ir], cd = chi_d[ir];
                Vec2 ds = fc.delta_polar(ir, r, th);
                cplx mode_phase = std::polar(1.0, (kb - ka) * th);
                double ra = mc[a].val[ir], rb = mc[b].val[ir];
                // quadratic S-term + 2 (S - S(0)) . A_alpha
                double w1 = (ds.x * ds.x + ds.y * ds.y) + 2.0 * ds.y * alpha / r;
                cplx t1 = cv * cv * ra * rb * w1 * mode_phase;
                // |grad chi|^2 diagonal
                cplx t2 = (a == b) ? cplx{cd * cd * ra * rb, 0.0} : cplx{0.0, 0.0};
                // 2 <chi G_a | (S - S(0)) . (-i grad)(chi G_b)>
                cplx db_r = -kI * (cd * rb + cv * mc[b].dval[ir]);
                cplx db_t = cplx(kb / r * cv * rb, 0.0);
                cplx t3 = 2.0 * cv * ra * (ds.x * db_r + ds.y * db_t) * mode_phase;
                return t1 + t2 + t3;
            });
            out.xi[a][b] = entry;
        }
    }
    return out;
}

}  // namespace

double friedrichs_form(const RegularPart& phi, double alpha, const PerturbationField& field,
                       const PolarGrid& grid) {
    if (phi.empty()) return 0.0;
    if (alpha > 0.0 && !(phi.vanishing_rate > 0.0))
        throw domain_error(
            "friedrichs_form: insufficient decay at the origin (vanishing rate <= 0)");
    FieldCache fc = cache_field(field, grid.radii());
    return friedrichs_on(phi, alpha, fc, grid);
}

XiMatrix xi_matrix(double alpha, const PerturbationField& field, const Cutoff& cutoff,
                   double lambda, const PolarGrid& grid) {
    if (!(lambda > 0.0)) throw domain_error("xi_matrix: lambda > 0");
    FieldCache fc = cache_field(field, grid.radii());
    XiMatrix fine = xi_on(alpha, fc, cutoff, lambda, grid);
    PolarGrid cg = grid.coarse();
    FieldCache fc2 = cache_field(field, cg.radii());
    XiMatrix coarse = xi_on(alpha, fc2, cutoff, lambda, cg);
    double err = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            err = std::max(err, std::abs(fine.xi[a][b] - coarse.xi[a][b]));
    fine.quad_error = err + 1e-14;
    return fine;
}

cplx trial_value(const TrialFunction& psi, double r, double theta) {
    cplx v = psi.phi.empty() ? cplx{0.0, 0.0} : psi.phi.value(r, theta);
    double cv = psi.cutoff.value(r);
    if (cv != 0.0 && !psi.charges_zero()) {
        cplx g{0.0, 0.0};
        if (psi.q0 != cplx{0.0, 0.0})
            g += psi.q0 * greens::green_eval(GreenFunction(0, psi.alpha, psi.lambda), r, theta);
        if (psi.qm1 != cplx{0.0, 0.0})
            g += psi.qm1 *
                 greens::green_eval(GreenFunction(-1, psi.alpha, psi.lambda), r, theta);
        v += phase_factor(psi.field.s_at_origin(), r, theta) * cv * g;
    }
    return v;
}

bool check_trial_asymptotics(const RegularPart& phi, int n_theta) {
    if (phi.empty()) return true;
    auto mean_sq = [&](double r) {
        double s = 0.0;
        for (int j = 0; j < n_theta; ++j) s += std::norm(phi.value(r, 2.0 * kPi * j / n_theta));
        return s / n_theta;
    };
    auto mean_dsq = [&](double r) {
        double s = 0.0;
        for (int j = 0; j < n_theta; ++j)
            s += std::norm(regular_grad(phi, r, 2.0 * kPi * j / n_theta).r);
        return r * r * s / n_theta;
    };
    double m3 = mean_sq(1e-3), m5 = mean_sq(1e-5);
    double d3 = mean_dsq(1e-3), d5 = mean_dsq(1e-5);
    double floor = 1e-14 * (1.0 + m3 + d3);
    return m5 <= 0.9 * m3 + floor && d5 <= 0.9 * d3 + floor;
}

QBetaBreakdown qbeta_breakdown(const TrialFunction& psi, const HermitianCoupling& beta,
                               const PolarGrid& grid) {
    QBetaBreakdown out;
    const double alpha = psi.alpha;
    const double lambda = psi.lambda;
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("qbeta: alpha in (0,1)");
    if (!(lambda > 0.0)) throw domain_error("qbeta: lambda > 0");
    if (!check_trial_asymptotics(psi.phi))
        throw domain_error("qbeta: regular part violates the form-domain tail asymptotics");

    FieldCache fc = cache_field(psi.field, grid.radii());
    out.friedrichs = psi.phi.empty() ? 0.0 : friedrichs_form(psi.phi, alpha, psi.field, grid);

    if (psi.charges_zero()) {
        out.value = out.friedrichs;
        return out;
    }

    const auto& radii = grid.radii();
    ModeCache mc[2] = {cache_mode(GreenFunction(0, alpha, lambda), radii, false),
                       cache_mode(GreenFunction(-1, alpha, lambda), radii, false)};
    std::vector<double> chi_v(radii.size()), chi_d(radii.size()), chi_l(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        chi_v[i] = psi.cutoff.value(radii[i]);
        chi_d[i] = psi.cutoff.deriv(radii[i]);
        chi_l[i] = psi.cutoff.laplacian(radii[i]);
    }
    const Vec2 s0 = psi.field.s_at_origin();
    const cplx q[2] = {psi.q0, psi.qm1};

    // || psi ||^2 and || phi ||^2
    out.norm_psi2 = grid.integrate([&](std::size_t ir, double r, std::size_t, double th) {
        cplx v = psi.phi.empty() ? cplx{0.0, 0.0} : psi.phi.value(r, th);
        if (chi_v[ir] != 0.0) {
            cplx gsum = q[0] * mc[0].val[ir] +
                        q[1] * mc[1].val[ir] * std::polar(1.0, -th);
            v += phase_factor(s0, r, th) * chi_v[ir] * gsum;
        }
        return std::norm(v);
    });
    out.norm_phi2 =
        psi.phi.empty()
            ? 0.0
            : grid.integrate([&](std::size_t, double r, std::size_t, double th) {
                  return std::norm(psi.phi.value(r, th));
              });

    // cross terms, restricted to the cutoff support
    if (!psi.phi.empty()) {
        for (int a = 0; a < 2; ++a) {
            if (q[a] == cplx{0.0, 0.0}) {
                out.cross[a] = {0.0, 0.0};
                continue;
            }
            int k = mode_of(a);
            cplx ii = grid.integrate_c([&](std::size_t ir, double r, std::size_t,
                                           double th) -> cplx {
                if (r >= psi.cutoff.b) return {0.0, 0.0};
                double cv = chi_v[ir], cd = chi_d[ir];
                Vec2 ds = fc.delta_polar(ir, r, th);
                cplx ph = phase_factor(s0, r, th) * std::polar(1.0, k * th);
                double gk = mc[a].val[ir];

                // I1: <(-i grad + A) phi | e^{-iS0 x} ((S-S0) chi - i grad chi) G_k>
                cplx v = psi.phi.value(r, th);
                PolarVec gphi = regular_grad(psi.phi, r, th);
                cplx pr = -kI * gphi.r;
                cplx pt = -kI * gphi.t + (alpha / r) * v;
                cplx vr = (ds.x * cv - kI * cd) * gk;
                cplx vt = ds.y * cv * gk;
                cplx i1 = (std::conj(pr) * vr + std::conj(pt) * vt) * ph;

                // I2: <phi | e^{-iS0 x} [ (S-S0)^2 chi + 2 S0.((S-S0) chi - i grad chi)
                //                         + lap chi ] G_k>
                double c = std::cos(th), sn = std::sin(th);
                Vec2 s0p{s0.x * c + s0.y * sn, -s0.x * sn + s0.y * c};
                cplx bracket = (ds.x * ds.x + ds.y * ds.y) * cv +
                               2.0 * (s0p.x * (ds.x * cv - kI * cd) + s0p.y * ds.y * cv) +
                               chi_l[ir];
                cplx i2 = std::conj(v) * bracket * gk * ph;

                return 2.0 * i1 + i2;
            });
            out.cross[a] = ii;
        }
    }

    out.xi = xi_matrix(alpha, psi.field, psi.cutoff, lambda, grid);

    cplx block{0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            cplx m = beta.entry(a, b) + out.xi.xi[a][b];
            if (a == b)
                m += kPi * kPi * std::pow(lambda, 2.0 * order_of(a, alpha)) / sinpi(alpha);
            block += std::conj(q[a]) * q[b] * m;
        }
    }
    out.charge_block = block;

    double cross_total = 0.0;
    for (int a = 0; a < 2; ++a) cross_total += 2.0 * std::real(q[a] * out.cross[a]);

    out.value = out.friedrichs - lambda * lambda * out.norm_psi2 +
                lambda * lambda * out.norm_phi2 + cross_total + std::real(block);
    return out;
}

double qbeta_eval(const TrialFunction& psi, const HermitianCoupling& beta,
                  const PolarGrid& grid) {
    return qbeta_breakdown(psi, beta, grid).value;
}

TrialFunction change_lambda(const TrialFunction& psi, double lambda2) {
    if (!(lambda2 > 0.0)) throw domain_error("change_lambda: lambda > 0");
    if (lambda2 == psi.lambda) return psi;

    TrialFunction out = psi;
    out.lambda = lambda2;
    if (psi.charges_zero()) return out;

    const double alpha = psi.alpha;
    const Cutoff chi = psi.cutoff;
    const Vec2 s0 = psi.field.s_at_origin();
    const cplx q[2] = {psi.q0, psi.qm1};
    GreenFunction g1[2] = {GreenFunction(0, alpha, psi.lambda),
                           GreenFunction(-1, alpha, psi.lambda)};
    GreenFunction g2[2] = {GreenFunction(0, alpha, lambda2),
                           GreenFunction(-1, alpha, lambda2)};
    RegularPart base = psi.phi;

    auto delta_val = [=](double r, double th) -> cplx {
        double cv = chi.value(r);
        if (cv == 0.0) return {0.0, 0.0};
        cplx s{0.0, 0.0};
        for (int a = 0; a < 2; ++a) {
            if (q[a] == cplx{0.0, 0.0}) continue;
            double dr = greens::green_radial_lambda_diff(g1[a], g2[a], r);
            s += q[a] * dr * std::polar(1.0, mode_of(a) * th);
        }
        return phase_factor(s0, r, th) * cv * s;
    };
    auto delta_grad = [=](double r, double th) -> PolarVec {
        double cv = chi.value(r);
        double cd = chi.deriv(r);
        if (cv == 0.0 && cd == 0.0) return {};
        cplx ph = phase_factor(s0, r, th);
        double c = std::cos(th), sn = std::sin(th);
        Vec2 s0p{s0.x * c + s0.y * sn, -s0.x * sn + s0.y * c};
        PolarVec g{};
        cplx inner{0.0, 0.0};
        for (int a = 0; a < 2; ++a) {
            if (q[a] == cplx{0.0, 0.0}) continue;
            int k = mode_of(a);
            double dv = greens::green_radial_lambda_diff(g1[a], g2[a], r);
            double dd = greens::green_radial_lambda_diff_deriv(g1[a], g2[a], r);
            cplx mode = std::polar(1.0, k * th);
            g.r += q[a] * mode * (cd * dv + cv * dd);
            g.t += q[a] * mode * (cplx(0.0, k) / r * cv * dv);
            inner += q[a] * mode * (cv * dv);
        }
        // phase gradient: grad e^{-i S0.x} = -i S0 e^{-i S0.x}
        return {ph * (g.r - kI * s0p.x * inner), ph * (g.t - kI * s0p.y * inner)};
    };

    RegularPart phi2;
    phi2.value = [base, delta_val](double r, double th) -> cplx {
        cplx v = base.empty() ? cplx{0.0, 0.0} : base.value(r, th);
        return v + delta_val(r, th);
    };
    phi2.grad = [base, delta_grad](double r, double th) -> PolarVec {
        PolarVec g = base.empty() ? PolarVec{} : regular_grad(base, r, th);
        return g + delta_grad(r, th);
    };
    double rate = base.empty() ? 2.0 : base.vanishing_rate;
    if (psi.q0 != cplx{0.0, 0.0}) rate = std::min(rate, alpha);
    if (psi.qm1 != cplx{0.0, 0.0}) rate = std::min(rate, 1.0 - alpha);
    phi2.vanishing_rate = rate;
    out.phi = phi2;
    return out;
}

TrialFunction change_cutoff(const TrialFunction& psi, const fields::Cutoff& cutoff2) {
    TrialFunction out = psi;
    out.cutoff = cutoff2;
    if (psi.charges_zero()) return out;

    const Cutoff c1 = psi.cutoff;
    const Cutoff c2 = cutoff2;
    const Vec2 s0 = psi.field.s_at_origin();
    const cplx q[2] = {psi.q0, psi.qm1};
    GreenFunction gm[2] = {GreenFunction(0, psi.alpha, psi.lambda),
                           GreenFunction(-1, psi.alpha, psi.lambda)};
    RegularPart base = psi.phi;

    auto gsum = [=](double r, double th) -> cplx {
        cplx s{0.0, 0.0};
        for (int a = 0; a < 2; ++a) {
            if (q[a] == cplx{0.0, 0.0}) continue;
            s += q[a] * greens::green_radial(gm[a], r) * std::polar(1.0, mode_of(a) * th);
        }
        return s;
    };

    RegularPart phi2;
    phi2.value = [=](double r, double th) -> cplx {
        cplx v = base.empty() ? cplx{0.0, 0.0} : base.value(r, th);
        double dchi = c1.value(r) - c2.value(r);
        if (dchi != 0.0) v += phase_factor(s0, r, th) * dchi * gsum(r, th);
        return v;
    };
    phi2.grad = [=](double r, double th) -> PolarVec {
        PolarVec g = base.empty() ? PolarVec{} : regular_grad(base, r, th);
        double dchi = c1.value(r) - c2.value(r);
        double dchid = c1.deriv(r) - c2.deriv(r);
        if (dchi == 0.0 && dchid == 0.0) return g;
        cplx ph = phase_factor(s0, r, th);
        double c = std::cos(th), sn = std::sin(th);
        Vec2 s0p{s0.x * c + s0.y * sn, -s0.x * sn + s0.y * c};
        cplx inner = dchi * gsum(r, th);
        PolarVec d{};
        for (int a = 0; a < 2; ++a) {
            if (q[a] == cplx{0.0, 0.0}) continue;
            int k = mode_of(a);
            double gv = greens::green_radial(gm[a], r);
            double gd = greens::green_radial_deriv(gm[a], r);
            cplx mode = std::polar(1.0, k * th);
            d.r += q[a] * mode * (dchid * gv + dchi * gd);
            d.t += q[a] * mode * (cplx(0.0, k) / r * dchi * gv);
        }
        g.r += ph * (d.r - kI * s0p.x * inner);
        g.t += ph * (d.t - kI * s0p.y * inner);
        return g;
    };
    phi2.vanishing_rate = base.empty() ? 2.0 : base.vanishing_rate;
    out.phi = phi2;
    return out;
}

double coercivity_probe(const TrialFunction& psi, const HermitianCoupling& beta, double lambda,
                        const PolarGrid& grid) {
    TrialFunction rep = change_lambda(psi, lambda);
    QBetaBreakdown b = qbeta_breakdown(rep, beta, grid);
    double norm_psi2 = b.norm_psi2;
    if (rep.charges_zero()) {
        // the pure-Friedrichs path of the breakdown never needs ||psi||^2
        norm_psi2 = grid.integrate([&](std::size_t, double r, std::size_t, double th) {
            return std::norm(trial_value(rep, r, th));
        });
    }
    return b.value + lambda * lambda * norm_psi2;
}

quad::PolarGrid default_grid(const fields::Cutoff& cutoff) {
    const auto& d = quad::quad_defaults();
    double rmax = std::max(d.r_max, cutoff.b + 2.0);
    return quad::PolarGrid::standard(rmax, {cutoff.a, cutoff.b});
}

quad::PolarGrid default_grid(const TrialFunction& psi) { return default_grid(psi.cutoff); }

}  // namespace abq::forms
