// abq -- s-wave and p-wave Green functions of the unperturbed defect
// equation: evaluation, closed-form and quadrature norms, small-r expansion,
// defect residuals.
#pragma once

#include "abq/common.hpp"

namespace abq::greens {

/// G^{(k)}_lambda = lambda^nu K_nu(lambda r) e^{i k theta}, nu = |k+alpha|,
/// for k in {0,-1}.
struct GreenFunction {
    int k = 0;
    double alpha = 0.5;
    double lambda = 1.0;
    double nu = 0.5;

    GreenFunction(int k_, double alpha_, double lambda_);
};

cplx green_eval(const GreenFunction& g, double r, double theta);

/// Radial factor lambda^nu K_nu(lambda r) (the modulus profile).
double green_radial(const GreenFunction& g, double r);
/// d/dr of the radial factor.
double green_radial_deriv(const GreenFunction& g, double r);
/// d^2/dr^2 of the radial factor (derivative recurrences, not the ODE).
double green_radial_second(const GreenFunction& g, double r);

/// ||G||_2^2 = pi^2 nu / sin(pi alpha) * lambda^{2nu-2}.
double green_norm_closed(const GreenFunction& g);

/// 2 pi int_0^inf lambda^{2nu} K_nu(lambda r)^2 r dr by adaptive panels with
/// an analytic [0,eps] head (two-term expansion) and an exponential tail
/// bound; agrees with the closed form within rel_tol or throws.
double green_norm_quadrature(const GreenFunction& g, double rel_tol);

/// Two-term small-r expansion of the radial factor:
/// Gamma(nu) 2^{nu-1} r^{-nu} + Gamma(-nu) 2^{-1-nu} lambda^{2nu} r^{nu}.
/// Phase e^{i k theta} is applied by the caller; requires lambda*r < 1.
cplx green_asymptotic(const GreenFunction& g, double r);

/// Relative residual of -G'' - G'/r + ((k+alpha)^2/r^2 + lambda^2) G, scaled
/// by the sum of the term magnitudes. coeff_shift perturbs (k+alpha)^2 for
/// negative controls.
double defect_residual(const GreenFunction& g, double r, double coeff_shift = 0.0);

/// Radial factor of G_{lambda_a} - G_{lambda_b} at equal (k, alpha). The
/// r^{-nu} series halves cancel analytically; the plain difference loses all
/// digits as r -> 0, so the small-x regime is summed term by term.
double green_radial_lambda_diff(const GreenFunction& a, const GreenFunction& b, double r);
/// d/dr of the above.
double green_radial_lambda_diff_deriv(const GreenFunction& a, const GreenFunction& b, double r);

}  // namespace abq::greens
