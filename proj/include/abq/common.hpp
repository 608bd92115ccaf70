// abq -- shared basics: errors, 2D vectors, accurate sin(pi x), thread helper.
#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace abq {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Input/contract violation. The CLI maps this to exit code 2.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical non-convergence (quadrature budget, extrapolation failure, ...).
/// The CLI maps this to exit code 3.
struct numerics_error : std::runtime_error {
    explicit numerics_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// sin(pi*x) without the cancellation of sin(M_PI*x) near integer x.
inline double sinpi(double x) {
    double r = x - 2.0 * std::floor(x / 2.0);  // r in [0,2)
    double s = 1.0;
    if (r > 1.0) {
        r -= 1.0;
        s = -1.0;
    }
    if (r > 0.5) r = 1.0 - r;
    return s * std::sin(kPi * r);
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 from_polar(double r, double theta) {
    return {r * std::cos(theta), r * std::sin(theta)};
}

/// Complex vector expressed in the local polar orthonormal basis (r_hat, theta_hat).
struct PolarVec {
    cplx r{0.0, 0.0};
    cplx t{0.0, 0.0};
};

inline PolarVec operator+(const PolarVec& a, const PolarVec& b) { return {a.r + b.r, a.t + b.t}; }
inline PolarVec operator-(const PolarVec& a, const PolarVec& b) { return {a.r - b.r, a.t - b.t}; }
inline PolarVec operator*(cplx c, const PolarVec& a) { return {c * a.r, c * a.t}; }

/// <a|b> summed over polar components, antilinear in the first slot.
inline cplx dot_conj(const PolarVec& a, const PolarVec& b) {
    return std::conj(a.r) * b.r + std::conj(a.t) * b.t;
}

inline double norm2(const PolarVec& a) { return std::norm(a.r) + std::norm(a.t); }

/// Thread cap: ABQ_THREADS if set, else hardware concurrency.
inline unsigned thread_cap() {
    if (const char* env = std::getenv("ABQ_THREADS")) {
        long v = std::atol(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Index-parallel loop with deterministic output ordering (each index writes
/// only its own slot; chunks are static).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned nt = thread_cap();
    if (nt <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, n));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace abq
