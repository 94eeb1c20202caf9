#pragma once

#include <cmath>
#include <string>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "sphanova/error.hpp"

namespace sphanova {

namespace detail {
inline void check_df(int df) {
    if (df < 1) throw Error(Errc::DomainError, "degrees of freedom must be >= 1, got " + std::to_string(df));
}
} // namespace detail

inline double chi2_cdf(double x, int df) {
    detail::check_df(df);
    if (!(x >= 0.0)) throw Error(Errc::DomainError, "chi2_cdf needs x >= 0");
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(0.5 * df, 0.5 * x);
}

/// Upper tail 1 - chi2_cdf(x, df), accurate far into the tail.
inline double chi2_sf(double x, int df) {
    detail::check_df(df);
    if (!(x >= 0.0)) throw Error(Errc::DomainError, "chi2_sf needs x >= 0");
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

inline double chi2_quantile(double p, int df) {
    detail::check_df(df);
    if (!(p > 0.0 && p < 1.0)) throw Error(Errc::DomainError, "chi2_quantile needs 0 < p < 1");
    return 2.0 * boost::math::gamma_p_inv(0.5 * df, p);
}

inline double noncentral_chi2_cdf(double x, int df, double noncentrality) {
    detail::check_df(df);
    if (!(x >= 0.0) || !(noncentrality >= 0.0)) throw Error(Errc::DomainError, "noncentral_chi2_cdf domain");
    if (noncentrality == 0.0) return chi2_cdf(x, df);
    boost::math::non_central_chi_squared dist(static_cast<double>(df), noncentrality);
    return boost::math::cdf(dist, x);
}

/// Asymptotic power of a level-alpha chi-square test under noncentrality l.
inline double asymptotic_power(double noncentrality, int df, double alpha = 0.05) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::DomainError, "alpha must lie in (0, 1)");
    const double crit = chi2_quantile(1.0 - alpha, df);
    if (noncentrality == 0.0) return chi2_sf(crit, df);
    boost::math::non_central_chi_squared dist(static_cast<double>(df), noncentrality);
    return boost::math::cdf(boost::math::complement(dist, crit));
}

} // namespace sphanova
