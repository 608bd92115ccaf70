// abq -- per-angular-mode radial discretization of the Friedrichs
// Hamiltonian for azimuthal fields: eigenvalues by Sturm bisection,
// resolvent application, and the vanishing-flux convergence studies.
#pragma once

#include <functional>
#include <vector>

#include "abq/common.hpp"
#include "abq/fields.hpp"
#include "abq/forms.hpp"
#include "abq/quadrature.hpp"

namespace abq::spectral {

/// Radial nodes r_i = r_max (i/n)^grading, i = 1..n; clustered at the origin
/// so the r^nu boundary layer is resolved.
struct RadialGrid {
    double r_max;
    int n;
    double grading;
    std::vector<double> nodes;

    RadialGrid(double r_max_, int n_, double grading_ = 4.0);
    RadialGrid refined() const { return RadialGrid(r_max, 2 * n, grading); }
};

/// Discrete mode Hamiltonian -f'' - f'/r + v(r) f, v = (k+alpha+r s(r))^2/r^2,
/// as a P1 finite-element pencil in L^2(r dr) with lumped mass, reduced to the
/// symmetric tridiagonal T = M^{-1/2} K M^{-1/2}. Dirichlet at r_max; the
/// origin keeps its degree of freedom only in the regular sector k+alpha = 0.
struct ModeOperator {
    int k = 0;
    double alpha = 0.0;
    std::vector<double> dof_radii;  // includes 0 iff has_origin_dof
    std::vector<double> diag;       // T diagonal
    std::vector<double> off;        // T superdiagonal
    std::vector<double> mass;       // lumped M diagonal
    bool has_origin_dof = false;

    std::size_t size() const { return diag.size(); }
    /// max |T_ij - T_ji|; zero by construction, kept for the contract check
    double asymmetry() const { return 0.0; }
};

/// s_profile may be empty (S = 0). Requires s(0) = 0 when present.
ModeOperator assemble_mode_operator(int k, double alpha,
                                    const std::function<double(double)>& s_profile,
                                    const RadialGrid& grid);

/// Lowest `count` eigenvalues by bisection with Sturm counts.
std::vector<double> eigenvalues(const ModeOperator& op, int count);

struct EigResult {
    std::vector<double> values;      // Richardson-extrapolated over n and 2n
    std::vector<double> coarse;      // values at n
    double error_estimate = 0.0;     // max |E(2n) - E(n)| / 3
    bool coarse_warning = false;     // refinement moved an eigenvalue by > 5%
};

/// Eigenvalues extrapolated over two grid resolutions (h^2 leading error).
EigResult eigenvalues_extrapolated(int k, double alpha,
                                   const std::function<double(double)>& s_profile,
                                   const RadialGrid& grid, int count);

/// Eigenvector of T for an isolated eigenvalue, by inverse iteration;
/// returned in the nodal basis f(r_i) (not the weighted one).
std::vector<double> eigenvector(const ModeOperator& op, double eigenvalue);

struct ResolventResult {
    std::vector<cplx> u;     // nodal values on dof_radii
    double residual = 0.0;   // ||(K - zM)u - Mf|| / ||Mf||
    bool conditioning_warning = false;
};

/// Solves (H - z) u = f for z off [0, +inf), f given as nodal values.
ResolventResult resolvent_apply(const ModeOperator& op, cplx z, const std::vector<cplx>& f);

/// L^2(r dr) norm of nodal values under the lumped mass.
double mass_norm(const ModeOperator& op, const std::vector<cplx>& u);

/// || u_a - u_b ||_M / ||u_b||_M for the resolvents of two operators on the
/// same grid applied to the same radial closure (origin DOF padded with 0).
double resolvent_difference(const ModeOperator& a, const ModeOperator& b, cplx z,
                            const std::function<double(double)>& f);

struct GammaRow {
    double alpha;
    double q_alpha;        // Q^F_alpha[eta_alpha psi0]
    double q_zero;         // Q^F_0[psi0]
    double gap;            // |q_alpha - q_zero|
    double a_norm2;        // ||A_alpha eta_alpha psi0||^2
    double a_bound;        // alpha ||psi0||^2 + inner-disk estimate
    double h1_gap;         // ||eta_alpha psi0 - psi0||_{H^1}
    double tele_residual;  // telescopic identity defect (roundoff scale)
};

struct GammaStudy {
    std::vector<GammaRow> rows;
    double q_zero = 0.0;
    bool h1_sane = false;
};

/// The recovery-sequence study over a decreasing alpha list. psi0 must be an
/// H^1 closure with gradient; the field must be uniformly bounded with
/// S(0) = 0 (the computation lives in that gauge).
GammaStudy gamma_recovery_study(const forms::RegularPart& psi0,
                                const std::vector<double>& alphas,
                                const fields::PerturbationField& field, double r_max = 14.0);

struct DivergenceProbe {
    bool divergent = false;
    double tail_increment = 0.0;  // mass added per decade of inner cutoff
};

/// Detects the log-divergence of ||A_alpha psi0||^2 when the recovery profile
/// is omitted and psi0(0) != 0.
DivergenceProbe a_term_divergence_probe(const forms::RegularPart& psi0, double alpha);

/// int_{B_1} |psi0|^2 / (|x|^2 (1 + |log|x||)^2) dx, graded panels plus the
/// analytic head below eps.
double sobolev_weight_norm(const forms::RegularPart& psi0, double eps = 1e-8,
                           int n_theta = 64);

}  // namespace abq::spectral
