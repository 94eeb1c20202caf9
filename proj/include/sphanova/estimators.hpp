#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "sphanova/multisample.hpp"
#include "sphanova/score.hpp"
#include "sphanova/sphere.hpp"

namespace sphanova {

/// Normalized resultant of the columns of `x`.
inline UnitVector spherical_mean(const Matrix& x) {
    const Vector s = x.rowwise().sum();
    if (!(s.norm() > 1e-10)) throw Error(Errc::DegenerateMean, "resultant vector is numerically zero");
    return UnitVector::normalize(s);
}

/// Pooled spherical mean of all groups: the common-location estimate under the null.
inline UnitVector spherical_mean(const MultiSample& ms) {
    Vector s = Vector::Zero(ms.dim());
    for (std::size_t i = 0; i < ms.groups(); ++i) s += ms.group(i).rowwise().sum();
    if (!(s.norm() > 1e-10)) throw Error(Errc::DegenerateMean, "pooled resultant vector is numerically zero");
    return UnitVector::normalize(s);
}

/// Ranks 1..n of the values; ties keep input order.
inline std::vector<std::size_t> ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::size_t> r(values.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) r[order[pos]] = pos + 1;
    return r;
}

/// Ranks of the projections X'θ within one group.
inline std::vector<std::size_t> ranks(const Matrix& group, const UnitVector& theta) {
    if (group.rows() != theta.dim()) throw Error(Errc::DimensionMismatch, "ranks");
    const Vector proj = group.transpose() * theta.vec();
    return ranks(std::vector<double>(proj.begin(), proj.end()));
}

/// K(r / (n + 1)) for r = 1..n.
inline std::vector<double> score_table(const ScoreFunction& k, std::size_t n) { return *k.table(n); }

namespace detail {

// n^{-1/2} Σ table[R_j - 1] S_θ(X_j)
inline Vector rank_central_sequence(const Matrix& group, const Vector& theta, const std::vector<double>& table) {
    const auto n = group.cols();
    const Vector proj = group.transpose() * theta;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return proj(a) < proj(b); });
    Vector acc = Vector::Zero(group.rows());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const Eigen::Index j = order[pos];
        const double c = proj(j);
        const double len = (group.col(j) - c * theta).norm();
        if (!(len > kCollinearTolerance))
            throw Error(Errc::CollinearInput, "observation " + std::to_string(j) + " is collinear with theta");
        acc.noalias() += (table[pos] / len) * (group.col(j) - c * theta);
    }
    return acc / std::sqrt(static_cast<double>(n));
}

} // namespace detail

/// Rank-based central sequence n^{-1/2} Σ_j K(R_j/(n+1)) S_θ(X_j); tangent at θ.
inline Vector rank_central_sequence(const Matrix& group, const UnitVector& theta, const ScoreFunction& k) {
    if (group.rows() != theta.dim()) throw Error(Errc::DimensionMismatch, "rank_central_sequence");
    return detail::rank_central_sequence(group, theta.vec(), *k.table(static_cast<std::size_t>(group.cols())));
}

struct CrossInfoEstimate {
    double rho_hat = 0.0;
    double j_hat = 0.0;  // 1 / rho_hat
    std::vector<std::pair<double, double>> trace;  // (ρ, h(ρ)) at every evaluation
};

struct CrossInfoOptions {
    double grid_step = 0.01;
    double rho_max = 100.0;
    double tolerance = 1e-6;
};

/// Estimates J(K, g) for one group. h(ρ) compares the rank central sequence
/// at θ̂ with the one at θ̂ pushed a distance n^{-1/2}ρ(k-1) along it; h is
/// piecewise continuous, so ρ̂ = inf{ρ > 0 : h(ρ) < 0} is located by a grid
/// scan followed by bisection of the bracketing grid cell.
inline CrossInfoEstimate cross_info_estimate(const Matrix& group, const UnitVector& theta_hat, const ScoreFunction& k,
                                             CrossInfoOptions opt = {}) {
    if (group.rows() != theta_hat.dim()) throw Error(Errc::DimensionMismatch, "cross_info_estimate");
    const auto n = static_cast<std::size_t>(group.cols());
    const double dim_factor = static_cast<double>(group.rows() - 1);
    const auto table_ptr = k.table(n);
    const std::vector<double>& table = *table_ptr;
    const Vector& th = theta_hat.vec();
    const Vector delta0 = detail::rank_central_sequence(group, th, table);
    if (!(delta0.norm() > 1e-10)) throw Error(Errc::ZeroCentralSequence, "rank central sequence vanishes at theta_hat");

    const Vector direction = dim_factor * (delta0 - th.dot(delta0) * th) / std::sqrt(static_cast<double>(n));
    const double scale = dim_factor / k.information();

    CrossInfoEstimate out;
    auto h = [&](double rho) {
        Vector moved = th + rho * direction;
        moved.normalize();
        const double v = scale * delta0.dot(detail::rank_central_sequence(group, moved, table));
        out.trace.emplace_back(rho, v);
        return v;
    };

    out.trace.emplace_back(0.0, scale * delta0.squaredNorm());
    const auto steps = static_cast<long>(std::llround(opt.rho_max / opt.grid_step));
    double lo = 0.0, hi = -1.0;
    for (long j = 1; j <= steps; ++j) {
        const double rho = opt.grid_step * static_cast<double>(j);
        if (h(rho) < 0.0) {
            hi = rho;
            break;
        }
        lo = rho;
    }
    if (hi < 0.0)
        throw Error(Errc::NoSignChange, "h(rho) stays nonnegative up to rho_max = " + std::to_string(opt.rho_max));
    while (hi - lo > opt.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) < 0.0) hi = mid; else lo = mid;
    }
    out.rho_hat = hi;
    out.j_hat = 1.0 / hi;
    return out;
}

} // namespace sphanova
