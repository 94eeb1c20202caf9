#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "sphanova/error.hpp"

namespace sphanova::quad {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
template <std::size_t N>
struct GaussLegendre {
    std::array<double, N> x{};
    std::array<double, N> w{};

    GaussLegendre() {
        const std::size_t half = (N + 1) / 2;
        for (std::size_t i = 0; i < half; ++i) {
            double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = 0.0;
                for (std::size_t j = 1; j <= N; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    const double jd = static_cast<double>(j);
                    p0 = ((2.0 * jd - 1.0) * z * p1 - (jd - 1.0) * p2) / jd;
                }
                dp = static_cast<double>(N) * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            x[i] = -z;
            x[N - 1 - i] = z;
            w[i] = w[N - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

inline const GaussLegendre<20>& gl20() {
    static const GaussLegendre<20> rule;
    return rule;
}

// Fixed 20-point rule on [a, b].
template <typename F>
double gauss_legendre(F&& f, double a, double b) {
    const auto& r = gl20();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < 20; ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

struct Tolerance {
    double abs = 1e-11;
    double rel = 1e-12;
    int max_depth = 40;
};

namespace detail {

template <typename F>
double adapt(F& f, double a, double b, double whole, double abs_tol, double rel_tol, int depth,
             int max_depth) {
    const double m = 0.5 * (a + b);
    const double left = gauss_legendre(f, a, m);
    const double right = gauss_legendre(f, m, b);
    const double both = left + right;
    const double err = std::abs(both - whole);
    if (err <= abs_tol || err <= rel_tol * std::abs(both) || (b - a) < 1e-15) return both;
    if (depth >= max_depth)
        throw Error(Errc::QuadratureFailure, "adaptive Gauss-Legendre did not converge");
    return adapt(f, a, m, left, 0.5 * abs_tol, rel_tol, depth + 1, max_depth) +
           adapt(f, m, b, right, 0.5 * abs_tol, rel_tol, depth + 1, max_depth);
}

} // namespace detail

// Composite Gauss-Legendre with adaptive bisection. `breaks` (sorted, inside
// [a, b]) seeds the initial partition; the absolute tolerance is shared among
// the pieces in proportion to their length.
template <typename F>
double integrate(F&& f, double a, double b, Tolerance tol = {}, std::span<const double> breaks = {}) {
    if (!(b > a)) return 0.0;
    std::vector<double> pts;
    pts.reserve(breaks.size() + 2);
    pts.push_back(a);
    for (double p : breaks)
        if (p > pts.back() && p < b) pts.push_back(p);
    pts.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i], hi = pts[i + 1];
        const double share = tol.abs * (hi - lo) / (b - a);
        total += detail::adapt(f, lo, hi, gauss_legendre(f, lo, hi), share, tol.rel, 0, tol.max_depth);
    }
    return total;
}

} // namespace sphanova::quad
