// abq -- flux normalization, the singular potential, regular perturbations S,
// the radial cutoff chi, the recovery profile eta, and angular averaging.
#pragma once

#include <functional>

#include "abq/common.hpp"

namespace abq::fields {

/// Normalized flux: raw = 2*ell + (conjugated ? -alpha : alpha), alpha in (0,1).
struct FluxParameter {
    double alpha = 0.0;
    long long ell = 0;
    bool conjugated = false;

    double reconstruct_raw() const {
        return 2.0 * static_cast<double>(ell) + (conjugated ? -alpha : alpha);
    }
};

/// Strip the even-integer flux part and fold negative residuals by conjugation.
/// Integer raw flux is rejected: even values are the trivial Laplacian, odd
/// values have no representative in (0,1).
FluxParameter reduce_flux(double raw);

/// A_alpha(x) = alpha * x_perp / |x|^2; throws at the origin.
Vec2 a_alpha_eval(double alpha, Vec2 x);

/// Regular perturbation S with the hypotheses tracked alongside the values.
class PerturbationField {
  public:
    PerturbationField() = default;  // zero field

    static PerturbationField zero();
    /// S(x) = s(|x|) x_perp/|x| from a radial profile with s(0) = 0.
    static PerturbationField azimuthal(std::function<double(double)> s_profile,
                                       double lipschitz_bound, bool uniformly_bounded,
                                       double sup_norm);
    /// Homogeneous field: s(r) = B r / 2 (unbounded at infinity).
    static PerturbationField homogeneous(double b_intensity);
    /// Homogeneous field smoothly capped beyond cap_radius (uniformly bounded).
    static PerturbationField homogeneous_capped(double b_intensity, double cap_radius);
    /// Generic closure-defined field (divergence-free by contract).
    static PerturbationField custom(std::function<Vec2(Vec2)> eval, Vec2 s_at_origin,
                                    double lipschitz_bound, bool uniformly_bounded);

    Vec2 eval(Vec2 x) const;
    /// (S . r_hat, S . theta_hat) at the polar point.
    Vec2 polar_components(double r, double theta) const;

    Vec2 s_at_origin() const { return s0_; }
    double lipschitz_bound() const { return lipschitz_; }
    bool uniformly_bounded() const { return bounded_; }
    bool is_azimuthal() const { return static_cast<bool>(s_profile_); }
    bool is_zero() const { return zero_; }
    /// Radial profile value s(r); only for azimuthal fields (0 for the zero field).
    double s_of_r(double r) const;

  private:
    std::function<Vec2(Vec2)> eval_cart_;
    std::function<double(double)> s_profile_;
    Vec2 s0_{};
    double lipschitz_ = 0.0;
    bool bounded_ = true;
    bool zero_ = true;
};

/// Numerical divergence by central differences, for the gauge checks.
double divergence_fd(const PerturbationField& field, Vec2 x, double h);

/// Radial C^2 cutoff: 1 on [0,a], quintic Hermite bridge on [a,b], 0 beyond.
struct Cutoff {
    double a = 1.0;
    double b = 2.0;

    Cutoff() = default;
    Cutoff(double inner, double outer);

    double value(double r) const;
    double deriv(double r) const;
    double second(double r) const;
    /// Laplacian of the radial bump: chi'' + chi'/r.
    double laplacian(double r) const;
};

/// Recovery profile: (r/sqrt(alpha))^alpha inside B_sqrt(alpha), 1 outside
/// B_2sqrt(alpha), cubic Hermite bridge between (C^1 at both junctions,
/// |eta'| <= sqrt(alpha) on the bridge, excursion above 1 at most 4 alpha/27).
struct RecoveryProfile {
    double alpha = 0.25;

    explicit RecoveryProfile(double a);

    double inner_radius() const { return std::sqrt(alpha); }
    double outer_radius() const { return 2.0 * std::sqrt(alpha); }

    double value(double r) const;
    double deriv(double r) const;
};

struct EtaEval {
    double value;
    double derivative;
};

EtaEval eta_eval(const RecoveryProfile& profile, double r);

/// Trapezoidal angular average (1/2pi) int f(r,theta) dtheta; spectrally
/// accurate for trigonometric-polynomial content below n_theta.
cplx angular_average(const std::function<cplx(double, double)>& f, double r, int n_theta);

}  // namespace abq::fields
