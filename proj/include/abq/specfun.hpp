// abq -- scalar transcendental kernels built from scratch: Gamma at real
// arguments and the Macdonald function K_nu for fractional order.
#pragma once

#include "abq/common.hpp"

namespace abq::specfun {

/// Centralized accuracy knobs for the kernels. The crossover at x = 2 is
/// pinned by the series/large-x agreement sweep in the unit tests.
struct KernelConfig {
    double series_crossover_x = 2.0;
    int series_max_terms = 80;
    double series_eps = 1e-17;
    int cf2_max_iter = 30000;
    double cf2_eps = 5e-16;
};

const KernelConfig& kernel_config();

/// Gamma(x) for real x away from the poles {0,-1,-2,...}; Lanczos with
/// reflection for x < 0.5.
double gamma_fn(double x);

/// K_nu(x) for order nu in (0,2), x > 0. Orders in [1,2) go through the
/// upward recurrence on base orders inside (0,1); nu == 1 is rejected.
double bessel_k(double nu, double x);

/// d/dx K_nu(x) for nu in (0,1), via K_nu' = -K_{1-nu} - (nu/x) K_nu
/// (the symmetric-order form of -(K_{nu-1}+K_{nu+1})/2).
double bessel_k_derivative(double nu, double x);

/// d^2/dx^2 K_nu(x) for nu in (0,1), from the derivative recurrence applied
/// twice: K'' = K_nu (1 + nu(nu+1)/x^2) + K_{1-nu}/x.
double bessel_k_second_derivative(double nu, double x);

namespace detail {
/// Series route K_mu = pi (I_{-mu} - I_mu) / (2 sin(pi mu)), mu in (0,1).
double bessel_k_series(double mu, double x);
/// Temme/Thompson-Barnett continued-fraction route, mu in (0,1), x >= ~1.5.
double bessel_k_cf2(double mu, double x);
}  // namespace detail

}  // namespace abq::specfun
