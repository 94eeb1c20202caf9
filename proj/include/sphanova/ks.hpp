#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sphanova/error.hpp"

namespace sphanova::ks {

struct Result {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// D_n = sup |F_n - F| from the fitted-cdf values F(x_i) (any order).
inline double statistic(std::vector<double> u) {
    if (u.empty()) throw Error(Errc::DomainError, "KS statistic of an empty sample");
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double i1 = static_cast<double>(i);
        d = std::max({d, (i1 + 1.0) / n - u[i], u[i] - i1 / n});
    }
    return d;
}

/// P(K > lambda) for the Kolmogorov limit distribution.
inline double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double s = 0.0;
        for (int j = 1; j <= 20; ++j) {
            const double odd = 2.0 * j - 1.0;
            s += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        s += (j % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

/// Asymptotic p-value with Stephens' small-sample correction.
inline double p_value(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

/// One-sample test of data against a continuous cdf.
template <typename Cdf>
Result test(const std::vector<double>& data, Cdf&& cdf) {
    std::vector<double> u;
    u.reserve(data.size());
    for (double x : data) u.push_back(cdf(x));
    Result r;
    r.statistic = statistic(std::move(u));
    r.p_value = p_value(r.statistic, data.size());
    return r;
}

} // namespace sphanova::ks
