#include "abq/extensions.hpp"

#include <algorithm>
#include <cmath>

#include "abq/specfun.hpp"

namespace abq::ext {

using forms::HermitianCoupling;
using forms::mode_of;
using forms::order_of;
using greens::GreenFunction;

double ExtensionMatrix::cond1() const {
    double d = std::abs(det());
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    double nm = std::max(std::abs(m[0][0]) + std::abs(m[1][0]),
                         std::abs(m[0][1]) + std::abs(m[1][1]));
    // inverse entries are the adjugate over the determinant
    double ninv = std::max(std::abs(m[1][1]) + std::abs(m[1][0]),
                           std::abs(m[0][1]) + std::abs(m[0][0])) /
                  d;
    return nm * ninv;
}

ExtensionMatrix extension_matrix(const HermitianCoupling& beta, double alpha, double lambda) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("extension_matrix: alpha in (0,1)");
    if (!(lambda > 0.0)) throw domain_error("extension_matrix: lambda > 0");
    ExtensionMatrix out;
    out.beta = beta;
    out.alpha = alpha;
    out.lambda = lambda;
    double s = sinpi(alpha);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            out.m[a][b] = beta.entry(a, b);
            if (a == b)
                out.m[a][b] += kPi * kPi * std::pow(lambda, 2.0 * order_of(a, alpha)) / s;
        }
    }
    return out;
}

namespace {

double det_at(const HermitianCoupling& beta, double alpha, double lambda) {
    ExtensionMatrix m = extension_matrix(beta, alpha, lambda);
    // real for Hermitian beta
    return m.det().real();
}

}  // namespace

BoundStateResult bound_states(const HermitianCoupling& beta, double alpha, double bracket_lo,
                              double bracket_hi) {
    if (!(bracket_lo > 0.0 && bracket_hi > bracket_lo))
        throw domain_error("bound_states: positive bracket required");
    BoundStateResult out;
    const int n = 200;
    double llo = std::log(bracket_lo), lhi = std::log(bracket_hi);
    double prev_l = bracket_lo;
    double prev_d = det_at(beta, alpha, bracket_lo);
    bool monotone = true;
    double prev_step = 0.0;
    for (int i = 1; i <= n; ++i) {
        double lam = std::exp(llo + (lhi - llo) * i / n);
        double d = det_at(beta, alpha, lam);
        if (i > 1 && (d - prev_d) * prev_step < 0.0) monotone = false;
        prev_step = d - prev_d;
        if (prev_d == 0.0) {
            out.states.push_back({prev_l, -prev_l * prev_l});
        } else if (d * prev_d < 0.0) {
            double a = prev_l, b = lam, fa = prev_d;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (a + b);
                double fm = det_at(beta, alpha, mid);
                if (fm == 0.0 || (b - a) < 1e-12 * std::max(1.0, a)) {
                    a = b = mid;
                    break;
                }
                if (fa * fm < 0.0) {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            double root = 0.5 * (a + b);
            out.states.push_back({root, -root * root});
        }
        prev_l = lam;
        prev_d = d;
    }
    if (out.states.empty() && monotone) out.bracket_warning = true;
    return out;
}

std::vector<double> geometric_radii(double r0, double r_min) {
    if (!(r0 > r_min && r_min > 0.0)) throw domain_error("geometric_radii: bad range");
    std::vector<double> rs;
    for (double r = r0; r >= r_min; r *= 0.5) rs.push_back(r);
    return rs;
}

namespace {

TraceResult extrapolate_sequence(const std::vector<cplx>& f_of_r) {
    TraceResult out;
    std::size_t n = f_of_r.size();
    if (n < 3) throw domain_error("boundary_trace: need at least 3 radii");
    // divergence scan: sustained geometric growth means an r^{-nu} component
    int growing = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(f_of_r[i]) > 1.5 * std::abs(f_of_r[i - 1]) &&
            std::abs(f_of_r[i]) > 1e3)
            ++growing;
        else
            growing = 0;
        if (growing >= 3) {
            out.converged = false;
            out.value = f_of_r.back();
            out.error_estimate = std::abs(f_of_r.back());
            return out;
        }
    }
    // Richardson on orders r and r^2 along the ratio-1/2 sequence
    std::vector<cplx> t1(n - 1), t2;
    for (std::size_t i = 0; i + 1 < n; ++i) t1[i] = 2.0 * f_of_r[i + 1] - f_of_r[i];
    t2.resize(t1.size() > 0 ? t1.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < t1.size(); ++i)
        t2[i] = (4.0 * t1[i + 1] - t1[i]) / 3.0;
    const std::vector<cplx>& best = t2.empty() ? t1 : t2;
    cplx last = best.back();
    double err = best.size() >= 2 ? std::abs(best[best.size() - 1] - best[best.size() - 2])
                                  : std::abs(last);
    out.value = last;
    out.error_estimate = err;
    out.converged = err < 1e-6 * (1.0 + std::abs(last));
    return out;
}

cplx derivative_or_fd(const std::function<cplx(double)>& f,
                      const std::function<cplx(double)>& df, double r) {
    if (df) return df(r);
    double h = 1e-3 * r;
    return (-f(r + 2 * h) + 8.0 * f(r + h) - 8.0 * f(r - h) + f(r - 2 * h)) / (12.0 * h);
}

}  // namespace

TraceResult boundary_trace(const std::function<cplx(double)>& f_mode,
                           const std::function<cplx(double)>& df_mode, int k, double alpha,
                           const std::vector<double>& r_grid) {
    if (k != 0 && k != -1) throw domain_error("boundary_trace: k in {0,-1}");
    double nu = std::abs(k + alpha);
    std::vector<cplx> seq;
    seq.reserve(r_grid.size());
    for (double r : r_grid) {
        cplx num = nu * f_mode(r) + r * derivative_or_fd(f_mode, df_mode, r);
        seq.push_back(num / std::pow(r, nu));
    }
    return extrapolate_sequence(seq);
}

TraceResult singular_charge(const std::function<cplx(double)>& f_mode,
                            const std::function<cplx(double)>& df_mode, int k, double alpha,
                            const std::vector<double>& r_grid) {
    if (k != 0 && k != -1) throw domain_error("singular_charge: k in {0,-1}");
    double nu = std::abs(k + alpha);
    std::vector<cplx> seq;
    seq.reserve(r_grid.size());
    for (double r : r_grid) {
        cplx num = r * derivative_or_fd(f_mode, df_mode, r) - nu * f_mode(r);
        seq.push_back(-num * std::pow(r, nu) / (2.0 * nu));
    }
    return extrapolate_sequence(seq);
}

std::pair<cplx, cplx> charge_solve(const HermitianCoupling& beta, double alpha, double lambda,
                                   cplx t0, cplx t1) {
    ExtensionMatrix em = extension_matrix(beta, alpha, lambda);
    if (em.cond1() >= 1e12)
        throw numerics_error("charge_solve: extension matrix singular near a bound state");
    // D M q = t with D_k = 2^{1-nu_k}/Gamma(nu_k)
    cplx rhs[2];
    for (int a = 0; a < 2; ++a) {
        double nu = order_of(a, alpha);
        double dk = std::pow(2.0, 1.0 - nu) / specfun::gamma_fn(nu);
        rhs[a] = (a == 0 ? t0 : t1) / dk;
    }
    cplx det = em.det();
    cplx q0 = (em.m[1][1] * rhs[0] - em.m[0][1] * rhs[1]) / det;
    cplx q1 = (em.m[0][0] * rhs[1] - em.m[1][0] * rhs[0]) / det;
    return {q0, q1};
}

cplx hbeta_correction_at(const forms::TrialFunction& psi, double r, double theta) {
    const fields::Cutoff& chi = psi.cutoff;
    if (r >= chi.b) return {0.0, 0.0};
    double cv = chi.value(r);
    double cd = chi.deriv(r);
    double cl = chi.laplacian(r);
    Vec2 sp = psi.field.polar_components(r, theta);
    Vec2 s0 = psi.field.s_at_origin();
    double c = std::cos(theta), sn = std::sin(theta);
    Vec2 s0p{s0.x * c + s0.y * sn, -s0.x * sn + s0.y * c};
    Vec2 ds{sp.x - s0p.x, sp.y - s0p.y};
    if (ds.x == 0.0 && ds.y == 0.0 && cd == 0.0 && cl == 0.0) return {0.0, 0.0};

    cplx phase = (s0.x == 0.0 && s0.y == 0.0)
                     ? cplx{1.0, 0.0}
                     : std::polar(1.0, -(s0.x * r * c + s0.y * r * sn));
    cplx total{0.0, 0.0};
    const cplx kI{0.0, 1.0};
    for (int a = 0; a < 2; ++a) {
        cplx q = psi.charge(a);
        if (q == cplx{0.0, 0.0}) continue;
        int k = mode_of(a);
        GreenFunction g(k, psi.alpha, psi.lambda);
        double gv = greens::green_radial(g, r);
        double gd = greens::green_radial_deriv(g, r);
        cplx mode = std::polar(1.0, k * theta);
        // (-i grad + A) G in the polar basis
        cplx pg_r = -kI * gd * mode;
        cplx pg_t = (k + psi.alpha) / r * gv * mode;
        // 2 ((S - S0) chi - i grad chi) . (-i grad + A) G
        cplx t1 = 2.0 * ((ds.x * cv - kI * cd) * pg_r + (ds.y * cv) * pg_t);
        // ((S - S0)^2 chi + 2 (S - S0).(-i grad chi) - lap chi) G
        cplx t2 = ((ds.x * ds.x + ds.y * ds.y) * cv + 2.0 * ds.x * (-kI * cd) - cl) * gv * mode;
        total += q * phase * (t1 + t2);
    }
    return total;
}

GriddedField hbeta_apply_correction(const forms::TrialFunction& psi,
                                    const quad::PolarGrid& grid) {
    GriddedField out;
    out.radii = grid.radii();
    out.theta = grid.theta();
    out.values.resize(out.radii.size() * out.theta.size());
    for (std::size_t i = 0; i < out.radii.size(); ++i)
        for (std::size_t j = 0; j < out.theta.size(); ++j)
            out.values[i * out.theta.size() + j] =
                hbeta_correction_at(psi, out.radii[i], out.theta[j]);
    return out;
}

}  // namespace abq::ext
