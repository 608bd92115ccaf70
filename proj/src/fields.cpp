#include "abq/fields.hpp"

#include <cmath>
#include <limits>

namespace abq::fields {

FluxParameter reduce_flux(double raw) {
    if (!std::isfinite(raw)) throw domain_error("reduce_flux: non-finite flux");
    double nearest = std::round(raw);
    if (std::abs(raw - nearest) < 1e-12) {
        long long n = static_cast<long long>(nearest);
        if (n % 2 == 0)
            throw domain_error("reduce_flux: even-integer flux is the trivial Laplacian case");
        throw domain_error("reduce_flux: odd-integer flux has no representative in (0,1)");
    }
    long long ell = static_cast<long long>(std::llround(raw / 2.0));
    double alpha_tilde = raw - 2.0 * static_cast<double>(ell);
    FluxParameter fp;
    fp.ell = ell;
    fp.conjugated = alpha_tilde < 0.0;
    fp.alpha = std::abs(alpha_tilde);
    return fp;
}

Vec2 a_alpha_eval(double alpha, Vec2 x) {
    double r2 = x.x * x.x + x.y * x.y;
    if (r2 <= 0.0) throw domain_error("a_alpha_eval: singular at the origin");
    return (alpha / r2) * perp(x);
}

PerturbationField PerturbationField::zero() { return PerturbationField(); }

PerturbationField PerturbationField::azimuthal(std::function<double(double)> s_profile,
                                               double lipschitz_bound, bool uniformly_bounded,
                                               double sup_norm) {
    if (std::abs(s_profile(0.0)) > 1e-12 * (1.0 + sup_norm))
        throw domain_error("azimuthal field: profile must vanish at the origin");
    PerturbationField f;
    f.s_profile_ = std::move(s_profile);
    f.eval_cart_ = [s = f.s_profile_](Vec2 x) -> Vec2 {
        double r = norm(x);
        if (r == 0.0) return {0.0, 0.0};
        return (s(r) / r) * perp(x);
    };
    f.s0_ = {0.0, 0.0};
    f.lipschitz_ = lipschitz_bound;
    f.bounded_ = uniformly_bounded;
    f.zero_ = false;
    return f;
}

PerturbationField PerturbationField::homogeneous(double b_intensity) {
    return azimuthal([b = b_intensity](double r) { return 0.5 * b * r; }, 0.5 * b_intensity,
                     /*uniformly_bounded=*/false, std::numeric_limits<double>::infinity());
}

namespace {

// Quintic Hermite cap bridge on [R, 2R]: value R slope 1 curvature 0 at R,
// value 1.2R slope/curvature 0 at 2R. Slight overshoot (~1.26R) near t=0.48.
double cap_profile(double r, double cap_radius) {
    if (r <= cap_radius) return r;
    if (r >= 2.0 * cap_radius) return 1.2 * cap_radius;
    double t = (r - cap_radius) / cap_radius;
    double t3 = t * t * t, t4 = t3 * t, t5 = t4 * t;
    return cap_radius * (1.0 + t - 4.0 * t3 + 5.0 * t4 - 1.8 * t5);
}

}  // namespace

PerturbationField PerturbationField::homogeneous_capped(double b_intensity, double cap_radius) {
    if (!(cap_radius > 0.0)) throw domain_error("homogeneous_capped: cap radius must be positive");
    double sup = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        double r = cap_radius * (1.0 + i / 1000.0);
        sup = std::max(sup, cap_profile(r, cap_radius));
    }
    sup *= 0.5 * std::abs(b_intensity);
    return azimuthal(
        [b = b_intensity, cr = cap_radius](double r) { return 0.5 * b * cap_profile(r, cr); },
        0.65 * std::abs(b_intensity), /*uniformly_bounded=*/true, sup);
}

PerturbationField PerturbationField::custom(std::function<Vec2(Vec2)> eval, Vec2 s_at_origin,
                                            double lipschitz_bound, bool uniformly_bounded) {
    PerturbationField f;
    f.eval_cart_ = std::move(eval);
    f.s0_ = s_at_origin;
    f.lipschitz_ = lipschitz_bound;
    f.bounded_ = uniformly_bounded;
    f.zero_ = false;
    return f;
}

Vec2 PerturbationField::eval(Vec2 x) const {
    if (zero_) return {0.0, 0.0};
    return eval_cart_(x);
}

Vec2 PerturbationField::polar_components(double r, double theta) const {
    if (zero_) return {0.0, 0.0};
    if (s_profile_) return {0.0, s_profile_(r)};
    Vec2 s = eval_cart_(from_polar(r, theta));
    double c = std::cos(theta), sn = std::sin(theta);
    return {s.x * c + s.y * sn, -s.x * sn + s.y * c};
}

double PerturbationField::s_of_r(double r) const {
    if (zero_) return 0.0;
    if (!s_profile_) throw domain_error("s_of_r: field is not azimuthal");
    return s_profile_(r);
}

double divergence_fd(const PerturbationField& field, Vec2 x, double h) {
    double dx = (field.eval({x.x + h, x.y}).x - field.eval({x.x - h, x.y}).x) / (2.0 * h);
    double dy = (field.eval({x.x, x.y + h}).y - field.eval({x.x, x.y - h}).y) / (2.0 * h);
    return dx + dy;
}

Cutoff::Cutoff(double inner, double outer) : a(inner), b(outer) {
    if (!(a > 0.0) || !(b > a)) throw domain_error("Cutoff: requires 0 < a < b");
}

double Cutoff::value(double r) const {
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    double t = (r - a) / (b - a);
    double t3 = t * t * t;
    return 1.0 - t3 * (10.0 - 15.0 * t + 6.0 * t * t);
}

double Cutoff::deriv(double r) const {
    if (r <= a || r >= b) return 0.0;
    double w = b - a;
    double t = (r - a) / w;
    double u = 1.0 - t;
    return -30.0 * t * t * u * u / w;
}

double Cutoff::second(double r) const {
    if (r <= a || r >= b) return 0.0;
    double w = b - a;
    double t = (r - a) / w;
    return -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (w * w);
}

double Cutoff::laplacian(double r) const {
    if (r <= a || r >= b) return 0.0;
    return second(r) + deriv(r) / r;
}

RecoveryProfile::RecoveryProfile(double a) : alpha(a) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("RecoveryProfile: alpha in (0,1)");
}

double RecoveryProfile::value(double r) const {
    double sa = std::sqrt(alpha);
    if (r <= 0.0) return 0.0;
    if (r <= sa) return std::pow(r / sa, alpha);
    if (r >= 2.0 * sa) return 1.0;
    double t = (r - sa) / sa;
    double u = 1.0 - t;
    return 1.0 + alpha * t * u * u;
}

double RecoveryProfile::deriv(double r) const {
    double sa = std::sqrt(alpha);
    if (r <= 0.0) return std::numeric_limits<double>::infinity();
    if (r <= sa) return sa * std::pow(r / sa, alpha - 1.0);
    if (r >= 2.0 * sa) return 0.0;
    double t = (r - sa) / sa;
    return sa * (1.0 - t) * (1.0 - 3.0 * t);
}

EtaEval eta_eval(const RecoveryProfile& profile, double r) {
    if (r < 0.0) throw domain_error("eta_eval: negative radius");
    return {profile.value(r), profile.deriv(r)};
}

cplx angular_average(const std::function<cplx(double, double)>& f, double r, int n_theta) {
    if (!(r > 0.0)) throw domain_error("angular_average: requires r > 0");
    if (n_theta < 8) throw domain_error("angular_average: n_theta >= 8 required");
    cplx s{0.0, 0.0};
    for (int j = 0; j < n_theta; ++j) s += f(r, 2.0 * kPi * j / n_theta);
    return s / static_cast<double>(n_theta);
}

}  // namespace abq::fields
