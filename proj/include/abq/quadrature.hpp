// abq -- quadrature machinery: adaptive Gauss-Kronrod panels and the graded
// polar product grid used by the quadratic-form assembly.
#pragma once

#include <functional>
#include <vector>

#include "abq/common.hpp"

namespace abq::quad {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// One Gauss-Kronrod 7-15 panel on [a,b].
Estimate gk15(const std::function<double(double)>& f, double a, double b);

/// Adaptive bisection with GK15 panels. Throws numerics_error once the panel
/// budget is exhausted without meeting rel_tol*|I| + abs_tol.
Estimate adaptive_gk(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_panels = 20000);

/// Panel breakpoints geometrically graded toward 0:
/// r_max, ratio*r_max, ..., down to min_panel, then 0.
std::vector<double> graded_breakpoints(double r_max, double ratio, double min_panel);

/// Insert extra breakpoints (deduplicated, sorted) into an existing list.
std::vector<double> with_breakpoints(std::vector<double> base, const std::vector<double>& extra);

struct RadialRule {
    std::vector<double> nodes;    // radial abscissae, ascending
    std::vector<double> weights;  // plain dr weights (no Jacobian)

    /// Gauss-Legendre nodes per panel; the panel touching 0 is mapped through
    /// r = h*u^sing_power so integrands r^beta with beta > -1 are resolved.
    static RadialRule build(const std::vector<double>& breakpoints, int gl_points,
                            double sing_power);

    double integrate(const std::function<double(double)>& f, bool with_r_jacobian) const;
};

/// Tensor grid: graded radial panels x uniform trapezoid in theta.
/// integrate() sums f * r dr dtheta over the disk r <= r_max.
class PolarGrid {
  public:
    PolarGrid(std::vector<double> breakpoints, int gl_points, int n_theta, double sing_power);

    /// Defaults from the assembly configuration (ratio 0.7, min panel 1e-6,
    /// 16-point panels, 256 angular nodes).
    static PolarGrid standard(double r_max, const std::vector<double>& extra_breaks = {});

    /// Coarser companion grid (8-point panels, half the angular nodes) used
    /// for quadrature error estimates.
    PolarGrid coarse() const;

    const std::vector<double>& radii() const { return radial_.nodes; }
    const std::vector<double>& theta() const { return theta_; }
    double r_max() const { return radial_.nodes.empty() ? 0.0 : breaks_.back(); }

    /// F(ir, r, it, theta); the (ir, it) indices let callers use per-radius caches.
    double integrate(const std::function<double(std::size_t, double, std::size_t, double)>& F) const;
    cplx integrate_c(const std::function<cplx(std::size_t, double, std::size_t, double)>& F) const;

    /// Radial-only integral with the r-Jacobian and the 2*pi angular factor.
    double integrate_radial_2d(const std::function<double(double)>& f) const;

  private:
    std::vector<double> breaks_;
    RadialRule radial_;
    std::vector<double> theta_;
    double dtheta_ = 0.0;
    int gl_points_ = 16;
    double sing_power_ = 8.0;
};

struct QuadDefaults {
    double ratio = 0.7;
    double min_panel = 1e-6;
    int gl_points = 16;
    int n_theta = 256;
    double r_max = 14.0;
    double sing_power = 8.0;
};

const QuadDefaults& quad_defaults();

}  // namespace abq::quad
