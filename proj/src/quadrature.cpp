#include "abq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace abq::quad {

namespace {

// QUADPACK dqk15 constants.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

// Gauss-Legendre nodes/weights on [-1,1], positive half.
constexpr double kGl16X[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGl16W[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

constexpr double kGl8X[4] = {
    0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
constexpr double kGl8W[4] = {
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

void gl_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    const double* xs = (n == 8) ? kGl8X : kGl16X;
    const double* ws = (n == 8) ? kGl8W : kGl16W;
    int half = (n == 8) ? 4 : 8;
    for (int i = half - 1; i >= 0; --i) {
        x.push_back(-xs[i]);
        w.push_back(ws[i]);
    }
    for (int i = 0; i < half; ++i) {
        x.push_back(xs[i]);
        w.push_back(ws[i]);
    }
}

}  // namespace

Estimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
    // Gauss points sit at the odd Kronrod indices 1,3,5.
    for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    double value = resk * h;
    double err = std::abs((resk - resg) * h);
    return {value, err};
}

Estimate adaptive_gk(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_panels) {
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    Estimate whole = gk15(f, a, b);
    std::priority_queue<Panel> heap;
    heap.push({a, b, whole.value, whole.error});
    double total = whole.value;
    double toterr = whole.error;
    int used = 1;
    while (toterr > rel_tol * std::abs(total) + abs_tol) {
        if (used >= max_panels || heap.empty()) {
            throw numerics_error("adaptive_gk: panel budget exhausted (err=" +
                                 std::to_string(toterr) + ")");
        }
        Panel p = heap.top();
        heap.pop();
        double mid = 0.5 * (p.a + p.b);
        if (mid <= p.a || mid >= p.b) {
            // interval at roundoff width: accept its current estimate
            total += 0.0;
            if (heap.empty()) break;
            continue;
        }
        Estimate l = gk15(f, p.a, mid);
        Estimate r = gk15(f, mid, p.b);
        total += l.value + r.value - p.value;
        toterr += l.error + r.error - p.error;
        heap.push({p.a, mid, l.value, l.error});
        heap.push({mid, p.b, r.value, r.error});
        ++used;
    }
    return {total, toterr};
}

std::vector<double> graded_breakpoints(double r_max, double ratio, double min_panel) {
    if (!(r_max > 0.0) || !(ratio > 0.0 && ratio < 1.0) || !(min_panel > 0.0))
        throw domain_error("graded_breakpoints: bad arguments");
    std::vector<double> pts;
    double r = r_max;
    while (r > min_panel) {
        pts.push_back(r);
        r *= ratio;
    }
    pts.push_back(r);
    pts.push_back(0.0);
    std::reverse(pts.begin(), pts.end());
    return pts;
}

std::vector<double> with_breakpoints(std::vector<double> base, const std::vector<double>& extra) {
    double hi = base.empty() ? 0.0 : base.back();
    for (double x : extra)
        if (x > 0.0 && x < hi) base.push_back(x);
    std::sort(base.begin(), base.end());
    base.erase(std::unique(base.begin(), base.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-15 * (1.0 + b); }),
               base.end());
    return base;
}

RadialRule RadialRule::build(const std::vector<double>& breakpoints, int gl_points,
                             double sing_power) {
    std::vector<double> gx, gw;
    gl_nodes(gl_points, gx, gw);
    RadialRule rule;
    for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
        double a = breakpoints[p], b = breakpoints[p + 1];
        if (!(b > a)) continue;
        if (a == 0.0) {
            // r = b * u^q on [0,1]: dr = b q u^{q-1} du
            double q = sing_power;
            for (std::size_t i = 0; i < gx.size(); ++i) {
                double u = 0.5 * (gx[i] + 1.0);
                double du = 0.5 * gw[i];
                double r = b * std::pow(u, q);
                if (r <= 0.0) continue;
                rule.nodes.push_back(r);
                rule.weights.push_back(du * b * q * std::pow(u, q - 1.0));
            }
        } else {
            double c = 0.5 * (a + b), h = 0.5 * (b - a);
            for (std::size_t i = 0; i < gx.size(); ++i) {
                rule.nodes.push_back(c + h * gx[i]);
                rule.weights.push_back(h * gw[i]);
            }
        }
    }
    return rule;
}

double RadialRule::integrate(const std::function<double(double)>& f, bool with_r_jacobian) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double v = f(nodes[i]) * weights[i];
        if (with_r_jacobian) v *= nodes[i];
        s += v;
    }
    return s;
}

PolarGrid::PolarGrid(std::vector<double> breakpoints, int gl_points, int n_theta,
                     double sing_power)
    : breaks_(std::move(breakpoints)),
      radial_(RadialRule::build(breaks_, gl_points, sing_power)),
      gl_points_(gl_points),
      sing_power_(sing_power) {
    if (n_theta < 8) throw domain_error("PolarGrid: n_theta >= 8 required");
    dtheta_ = 2.0 * kPi / n_theta;
    theta_.resize(n_theta);
    for (int j = 0; j < n_theta; ++j) theta_[j] = j * dtheta_;
}

PolarGrid PolarGrid::standard(double r_max, const std::vector<double>& extra_breaks) {
    const QuadDefaults& d = quad_defaults();
    auto bp = with_breakpoints(graded_breakpoints(r_max, d.ratio, d.min_panel), extra_breaks);
    return PolarGrid(bp, d.gl_points, d.n_theta, d.sing_power);
}

PolarGrid PolarGrid::coarse() const {
    return PolarGrid(breaks_, 8, std::max<int>(8, static_cast<int>(theta_.size()) / 2),
                     sing_power_);
}

double PolarGrid::integrate(
    const std::function<double(std::size_t, double, std::size_t, double)>& F) const {
    double s = 0.0;
    for (std::size_t i = 0; i < radial_.nodes.size(); ++i) {
        double r = radial_.nodes[i];
        double row = 0.0;
        for (std::size_t j = 0; j < theta_.size(); ++j) row += F(i, r, j, theta_[j]);
        s += row * radial_.weights[i] * r;
    }
    return s * dtheta_;
}

cplx PolarGrid::integrate_c(
    const std::function<cplx(std::size_t, double, std::size_t, double)>& F) const {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < radial_.nodes.size(); ++i) {
        double r = radial_.nodes[i];
        cplx row{0.0, 0.0};
        for (std::size_t j = 0; j < theta_.size(); ++j) row += F(i, r, j, theta_[j]);
        s += row * (radial_.weights[i] * r);
    }
    return s * dtheta_;
}

double PolarGrid::integrate_radial_2d(const std::function<double(double)>& f) const {
    return 2.0 * kPi * radial_.integrate(f, true);
}

const QuadDefaults& quad_defaults() {
    static const QuadDefaults d{};
    return d;
}

}  // namespace abq::quad
