// abq -- quadratic-form machinery: the Friedrichs form by polar quadrature,
// the Xi coupling matrix, the full singular-perturbation form on trial
// functions, lambda re-representation, and coercivity probes.
#pragma once

#include <array>
#include <functional>
#include <optional>

#include "abq/common.hpp"
#include "abq/fields.hpp"
#include "abq/greens.hpp"
#include "abq/quadrature.hpp"

namespace abq::forms {

/// 2x2 Hermitian coupling labeling the singular perturbation; index 0 is the
/// s-wave (k = 0), index 1 the p-wave (k = -1).
struct HermitianCoupling {
    double b00 = 0.0;
    double b11 = 0.0;
    cplx b01{0.0, 0.0};  // b10 = conj(b01)

    cplx entry(int i, int j) const {
        if (i == j) return (i == 0) ? cplx{b00, 0.0} : cplx{b11, 0.0};
        return (i == 0) ? b01 : std::conj(b01);
    }
};

inline int mode_of(int idx) { return idx == 0 ? 0 : -1; }
inline double order_of(int idx, double alpha) { return idx == 0 ? alpha : 1.0 - alpha; }

/// Regular part phi as closures over polar coordinates. The gradient closure
/// returns (d_r phi, (1/r) d_theta phi) in the (r_hat, theta_hat) basis; when
/// absent it is replaced by 4th-order central differences.
struct RegularPart {
    std::function<cplx(double, double)> value;
    std::function<PolarVec(double, double)> grad;  // optional
    double vanishing_rate = 1.0;                   // phi = O(r^rate) at the origin

    bool empty() const { return !static_cast<bool>(value); }
};

/// Zero regular part.
RegularPart zero_regular_part();

/// Gradient of phi, analytic when supplied, finite differences otherwise.
PolarVec regular_grad(const RegularPart& phi, double r, double theta);

/// psi = phi_lambda + e^{-i S(0).x} chi sum_k q^(k) G^(k)_lambda.
struct TrialFunction {
    RegularPart phi;
    double lambda = 1.0;
    cplx q0{0.0, 0.0};
    cplx qm1{0.0, 0.0};
    fields::Cutoff cutoff;
    fields::PerturbationField field;
    double alpha = 0.5;

    cplx charge(int idx) const { return idx == 0 ? q0 : qm1; }
    bool charges_zero() const { return q0 == cplx{0.0, 0.0} && qm1 == cplx{0.0, 0.0}; }
};

/// Full trial-function value at a point.
cplx trial_value(const TrialFunction& psi, double r, double theta);

/// Numerical check of the form-domain asymptotics on the grid tail:
/// <|phi|^2>(r) -> 0 and r^2 <|d_r phi|^2>(r) -> 0 as r -> 0.
bool check_trial_asymptotics(const RegularPart& phi, int n_theta = 32);

struct XiMatrix {
    std::array<std::array<cplx, 2>, 2> xi{};
    double quad_error = 0.0;
    double alpha = 0.0;
    double lambda = 0.0;
};

/// int |(-i grad + A_alpha + S) phi|^2 over the plane, by the polar grid.
/// Throws on a non-positive declared vanishing rate (the A_alpha term would
/// make the integral diverge).
double friedrichs_form(const RegularPart& phi, double alpha,
                       const fields::PerturbationField& field, const quad::PolarGrid& grid);

/// The three-term coupling matrix generated by S and the cutoff.
XiMatrix xi_matrix(double alpha, const fields::PerturbationField& field,
                   const fields::Cutoff& cutoff, double lambda, const quad::PolarGrid& grid);

struct QBetaBreakdown {
    double friedrichs = 0.0;
    double norm_psi2 = 0.0;
    double norm_phi2 = 0.0;
    std::array<cplx, 2> cross{};  // 2*I1_k + I2_k per mode
    cplx charge_block{0.0, 0.0};
    XiMatrix xi;
    double value = 0.0;
};

/// Every line of the singular-perturbation form. With zero charges this is
/// exactly friedrichs_form (same code path).
QBetaBreakdown qbeta_breakdown(const TrialFunction& psi, const HermitianCoupling& beta,
                               const quad::PolarGrid& grid);
double qbeta_eval(const TrialFunction& psi, const HermitianCoupling& beta,
                  const quad::PolarGrid& grid);

/// Equivalent representation at another lambda: charges unchanged, regular
/// part absorbs chi (G_{l1} - G_{l2}); the represented psi is pointwise the
/// same function.
TrialFunction change_lambda(const TrialFunction& psi, double lambda2);

/// Equivalent representation with another cutoff: the regular part absorbs
/// (chi_old - chi_new) sum q G; psi is pointwise unchanged.
TrialFunction change_cutoff(const TrialFunction& psi, const fields::Cutoff& cutoff2);

/// qbeta_eval at the re-representation lambda plus lambda^2 ||psi||^2.
double coercivity_probe(const TrialFunction& psi, const HermitianCoupling& beta, double lambda,
                        const quad::PolarGrid& grid);

/// Default assembly grid for a trial function (r_max from the defaults,
/// breakpoints at the cutoff radii).
quad::PolarGrid default_grid(const TrialFunction& psi);
quad::PolarGrid default_grid(const fields::Cutoff& cutoff);

}  // namespace abq::forms
