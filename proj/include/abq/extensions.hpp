// abq -- self-adjoint-extension machinery: the 2x2 extension matrix, bound
// states from its determinant, boundary-trace extraction, charge solving,
// and the surrogate correction of the operator action.
#pragma once

#include <functional>
#include <vector>

#include "abq/common.hpp"
#include "abq/forms.hpp"

namespace abq::ext {

/// M_{kk'}(lambda) = beta_{kk'} + pi^2 lambda^{2|k+alpha|}/sin(pi alpha) delta_{kk'}.
struct ExtensionMatrix {
    cplx m[2][2];
    forms::HermitianCoupling beta;
    double alpha = 0.5;
    double lambda = 1.0;

    cplx det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    /// 1-norm condition number (exact for 2x2).
    double cond1() const;
};

ExtensionMatrix extension_matrix(const forms::HermitianCoupling& beta, double alpha,
                                 double lambda);

struct BoundState {
    double lambda_star;
    double energy;  // -lambda_star^2
};

struct BoundStateResult {
    std::vector<BoundState> states;
    /// set when no sign change was found and the determinant is monotone over
    /// the bracket (the bracket may simply be too small)
    bool bracket_warning = false;
};

/// Roots of det M(lambda) = 0 in [bracket_lo, bracket_hi]: 200 samples
/// uniform in log lambda, bisection on each sign change, refined to 1e-12.
/// Valid for S = 0, where the surrogates solve the defect equation exactly.
BoundStateResult bound_states(const forms::HermitianCoupling& beta, double alpha,
                              double bracket_lo, double bracket_hi);

struct TraceResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
    bool converged = false;
};

/// lim_{r->0} [ |k+alpha| f(r) + r f'(r) ] / r^{|k+alpha|} for the mode-k
/// radial profile f, Richardson-extrapolated (orders 1,2) down a geometric
/// radius sequence. Flags divergence when the profile carries an r^{-nu}
/// component (outside the operator domain).
TraceResult boundary_trace(const std::function<cplx(double)>& f_mode,
                           const std::function<cplx(double)>& df_mode,  // may be null
                           int k, double alpha, const std::vector<double>& r_grid);

/// Coefficient of the singular r^{-nu} branch: -[r f'(r) - nu f(r)] r^nu/(2 nu),
/// extrapolated the same way. Zero exactly on the Friedrichs domain; this is
/// the numerically checkable content of the q = 0 boundary condition.
TraceResult singular_charge(const std::function<cplx(double)>& f_mode,
                            const std::function<cplx(double)>& df_mode, int k, double alpha,
                            const std::vector<double>& r_grid);

/// Geometric radius grid r0, r0/2, ..., down to r_min.
std::vector<double> geometric_radii(double r0, double r_min);

/// Solves (2^{1-nu_k}/Gamma(nu_k)) sum_k' M_{kk'} q^{k'} = t_k for the charges.
/// Throws near a bound state (conditioning threshold 1e12).
std::pair<cplx, cplx> charge_solve(const forms::HermitianCoupling& beta, double alpha,
                                   double lambda, cplx t0, cplx t1);

/// The bracketed correction of the operator action at one point, summed over
/// the charged modes (zero outside supp chi and inside the chi == 1 disk when
/// S = 0).
cplx hbeta_correction_at(const forms::TrialFunction& psi, double r, double theta);

struct GriddedField {
    std::vector<double> radii;
    std::vector<double> theta;
    std::vector<cplx> values;  // values[ir * theta.size() + it]
};

/// The correction evaluated on a polar grid.
GriddedField hbeta_apply_correction(const forms::TrialFunction& psi,
                                    const quad::PolarGrid& grid);

}  // namespace abq::ext
