#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sphanova/chi2.hpp"
#include "sphanova/estimators.hpp"
#include "sphanova/multisample.hpp"
#include "sphanova/score.hpp"
#include "sphanova/sphere.hpp"

namespace sphanova {

enum class Method { PseudoFvML, Rank, ReferenceForm };

constexpr std::string_view to_string(Method m) {
    switch (m) {
    case Method::PseudoFvML: return "pseudo";
    case Method::Rank: return "rank";
    case Method::ReferenceForm: return "reference";
    }
    return "unknown";
}

struct GroupDiagnostics {
    std::size_t n = 0;
    double B_hat = 0.0;
    double E_hat = 0.0;
    double D_hat = std::numeric_limits<double>::quiet_NaN();  // pseudo-FvML only
    double J_hat = std::numeric_limits<double>::quiet_NaN();  // rank only
};

struct TestResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    UnitVector theta_hat{1.0, 0.0};
    std::vector<GroupDiagnostics> per_group;
    Method method = Method::PseudoFvML;
    std::vector<std::string> scores;  // score labels for rank-based results

    bool reject(double alpha) const { return statistic > chi2_quantile(1.0 - alpha, df); }
};

/// Plug-in quantities of the pseudo-FvML statistic.
struct SampleStats {
    std::vector<Vector> xbar;  // group means, not normalized
    std::vector<double> B, E, D;
    double H = 0.0;  // Σ r_i D_i² B_i
};

inline constexpr double kDegeneracyTolerance = 1e-10;
inline constexpr double kNegativeClamp = 1e-9;

inline SampleStats sample_stats(const MultiSample& ms, const UnitVector& theta_hat) {
    if (theta_hat.dim() != ms.dim()) throw Error(Errc::DimensionMismatch, "theta_hat dimension");
    SampleStats s;
    for (std::size_t i = 0; i < ms.groups(); ++i) {
        const Matrix& g = ms.group(i);
        const double n = static_cast<double>(g.cols());
        const Vector proj = g.transpose() * theta_hat.vec();
        const double e = proj.sum() / n;
        const double b = 1.0 - proj.squaredNorm() / n;
        if (!(b > kDegeneracyTolerance))
            throw Error(Errc::DegenerateGroup, "group " + std::to_string(i) + ": B_hat vanishes (all mass at ±theta_hat)", i);
        if (!(std::abs(e) > kDegeneracyTolerance))
            throw Error(Errc::DegenerateGroup, "group " + std::to_string(i) + ": E_hat vanishes", i);
        s.xbar.push_back(g.rowwise().sum() / n);
        s.B.push_back(b);
        s.E.push_back(e);
        s.D.push_back(e / b);
        s.H += ms.weight(i) * (e / b) * (e / b) * b;
    }
    return s;
}

namespace detail {

inline int degrees_of_freedom(const MultiSample& ms) {
    return static_cast<int>((ms.groups() - 1) * static_cast<std::size_t>(ms.dim() - 1));
}

inline void finalize(TestResult& r) {
    if (!std::isfinite(r.statistic)) throw Error(Errc::InternalConsistency, "statistic is not finite");
    if (r.statistic < 0.0) {
        if (r.statistic < -kNegativeClamp)
            throw Error(Errc::InternalConsistency, "negative statistic " + std::to_string(r.statistic));
        r.statistic = 0.0;
    }
    r.p_value = chi2_sf(r.statistic, r.df);
}

inline Matrix projector(const UnitVector& theta) {
    const Vector& t = theta.vec();
    return Matrix::Identity(t.size(), t.size()) - t * t.transpose();
}

struct RankIngredients {
    std::vector<Vector> ubar;     // n_i^{-1} Σ_j K_i(R_ij/(n_i+1)) S(X_ij)
    std::vector<double> j_known;  // J(K_i)
    std::vector<double> j_hat;    // estimated J(K_i, g_i)
};

inline RankIngredients rank_ingredients(const MultiSample& ms, std::span<const ScoreFunction> scores,
                                        const UnitVector& theta_hat) {
    if (scores.size() != ms.groups())
        throw Error(Errc::DomainError, "rank test needs one score function per group");
    RankIngredients in;
    for (std::size_t i = 0; i < ms.groups(); ++i) {
        const Matrix& g = ms.group(i);
        try {
            const Vector delta = rank_central_sequence(g, theta_hat, scores[i]);
            in.ubar.push_back(delta / std::sqrt(static_cast<double>(g.cols())));
            in.j_hat.push_back(cross_info_estimate(g, theta_hat, scores[i]).j_hat);
        } catch (const Error& e) {
            throw Error(e.code(), "group " + std::to_string(i) + ": " + e.detail(), i);
        }
        in.j_known.push_back(scores[i].information());
    }
    return in;
}

} // namespace detail

/// Pseudo-FvML statistic, built from the plug-ins B̂, Ê, D̂, Ĥ only.
inline TestResult pseudo_fvml_test(const MultiSample& ms, std::optional<UnitVector> theta_hat = std::nullopt) {
    const UnitVector th = theta_hat ? *theta_hat : spherical_mean(ms);
    const SampleStats s = sample_stats(ms, th);
    const double km1 = static_cast<double>(ms.dim() - 1);
    const double n = static_cast<double>(ms.total());
    const Vector& t = th.vec();

    std::vector<Vector> px;  // (I - θ̂θ̂') X̄_i
    for (const auto& x : s.xbar) px.push_back(x - t.dot(x) * t);

    double diag = 0.0;
    Vector weighted = Vector::Zero(ms.dim());
    for (std::size_t i = 0; i < ms.groups(); ++i) {
        const double ni = static_cast<double>(ms.size(i));
        diag += ni * s.D[i] / s.E[i] * px[i].squaredNorm();
        weighted += ni * s.D[i] * px[i];
    }
    // Σ_{i,j} n_i n_j D_i D_j X̄_i'PX̄_j / n = |Σ_i n_i D_i P X̄_i|² / n
    const double cross = weighted.squaredNorm() / (n * s.H);

    TestResult r{km1 * (diag - cross), detail::degrees_of_freedom(ms), 1.0, th, {}, Method::PseudoFvML, {}};
    for (std::size_t i = 0; i < ms.groups(); ++i)
        r.per_group.push_back({ms.size(i), s.B[i], s.E[i], s.D[i], std::numeric_limits<double>::quiet_NaN()});
    detail::finalize(r);
    return r;
}

/// Rank-based statistic with scores (K_1, ..., K_m). The diagonal term uses
/// the known J(K_i), the cross term the estimated cross-informations.
inline TestResult rank_test(const MultiSample& ms, std::span<const ScoreFunction> scores,
                            std::optional<UnitVector> theta_hat = std::nullopt) {
    const UnitVector th = theta_hat ? *theta_hat : spherical_mean(ms);
    const auto in = detail::rank_ingredients(ms, scores, th);
    const double km1 = static_cast<double>(ms.dim() - 1);
    const double n = static_cast<double>(ms.total());

    double diag = 0.0, h = 0.0;
    Vector weighted = Vector::Zero(ms.dim());
    for (std::size_t i = 0; i < ms.groups(); ++i) {
        const double ni = static_cast<double>(ms.size(i));
        const double ratio = in.j_hat[i] / in.j_known[i];
        diag += ni / in.j_known[i] * in.ubar[i].squaredNorm();
        weighted += ni * ratio * in.ubar[i];
        h += ms.weight(i) * in.j_hat[i] * in.j_hat[i] / in.j_known[i];
    }
    const double cross = weighted.squaredNorm() / (n * h);

    TestResult r{km1 * (diag - cross), detail::degrees_of_freedom(ms), 1.0, th, {}, Method::Rank, {}};
    for (std::size_t i = 0; i < ms.groups(); ++i) {
        const Vector proj = ms.group(i).transpose() * th.vec();
        const double ni = static_cast<double>(ms.size(i));
        r.per_group.push_back({ms.size(i), 1.0 - proj.squaredNorm() / ni, proj.sum() / ni,
                               std::numeric_limits<double>::quiet_NaN(), in.j_hat[i]});
        r.scores.push_back(scores[i].label());
    }
    detail::finalize(r);
    return r;
}

/// Γ⁻ - Γ⁻ G Υ [Υ' G Γ⁻ G Υ]⁻ Υ' G Γ⁻: the null-restricted information
/// sandwich shared by every statistic and noncentrality in this library.
inline Matrix perp_matrix(const Matrix& gamma, const Matrix& cross, const Matrix& upsilon) {
    const Matrix a = pseudo_inverse(gamma);
    const Matrix left = a * cross * upsilon;
    Matrix middle = upsilon.transpose() * cross * a * cross * upsilon;
    middle = 0.5 * (middle + middle.transpose());
    Matrix out = a - left * pseudo_inverse(middle) * left.transpose();
    return 0.5 * (out + out.transpose());
}

/// diag(c_1 P, ..., c_m P)
inline Matrix block_projector(std::span<const double> coeffs, const Matrix& p) {
    const Eigen::Index k = p.rows();
    const auto m = static_cast<Eigen::Index>(coeffs.size());
    Matrix out = Matrix::Zero(m * k, m * k);
    for (Eigen::Index i = 0; i < m; ++i) out.block(i * k, i * k, k, k) = coeffs[static_cast<std::size_t>(i)] * p;
    return out;
}

/// ν⁻¹(1_m ⊗ P): blocks sqrt(r_i) P stacked vertically.
inline Matrix upsilon(std::span<const double> weights, const Matrix& p) {
    const Eigen::Index k = p.rows();
    const auto m = static_cast<Eigen::Index>(weights.size());
    Matrix out(m * k, k);
    for (Eigen::Index i = 0; i < m; ++i) out.block(i * k, 0, k, k) = std::sqrt(weights[static_cast<std::size_t>(i)]) * p;
    return out;
}

struct PseudoMode {};
struct RankMode {
    std::vector<ScoreFunction> scores;
};
using ReferenceMode = std::variant<PseudoMode, RankMode>;

/// The statistic as the generic quadratic form Δ'Γ^⊥Δ assembled from
/// block-diagonal information matrices and Moore-Penrose pseudo-inverses.
inline TestResult reference_quadratic_form(const MultiSample& ms, std::optional<UnitVector> theta_hat,
                                           const ReferenceMode& mode) {
    const UnitVector th = theta_hat ? *theta_hat : spherical_mean(ms);
    const Eigen::Index k = ms.dim();
    const auto m = ms.groups();
    const double km1 = static_cast<double>(k - 1);
    const Matrix p = detail::projector(th);

    std::vector<double> weights;
    for (std::size_t i = 0; i < m; ++i) weights.push_back(ms.weight(i));
    const Matrix ups = upsilon(weights, p);

    Vector delta(static_cast<Eigen::Index>(m) * k);
    std::vector<double> gamma_coef, cross_coef;
    TestResult r{0.0, detail::degrees_of_freedom(ms), 1.0, th, {}, Method::ReferenceForm, {}};

    if (std::holds_alternative<PseudoMode>(mode)) {
        // unit concentrations
        const SampleStats s = sample_stats(ms, th);
        for (std::size_t i = 0; i < m; ++i) {
            const double ni = static_cast<double>(ms.size(i));
            delta.segment(static_cast<Eigen::Index>(i) * k, k) = p * ms.group(i).rowwise().sum() / std::sqrt(ni);
            gamma_coef.push_back(s.B[i] / km1);
            cross_coef.push_back(s.E[i]);
            r.per_group.push_back({ms.size(i), s.B[i], s.E[i], s.D[i], std::numeric_limits<double>::quiet_NaN()});
        }
    } else {
        const auto& scores = std::get<RankMode>(mode).scores;
        const auto in = detail::rank_ingredients(ms, scores, th);
        for (std::size_t i = 0; i < m; ++i) {
            delta.segment(static_cast<Eigen::Index>(i) * k, k) = rank_central_sequence(ms.group(i), th, scores[i]);
            gamma_coef.push_back(in.j_known[i] / km1);
            cross_coef.push_back(in.j_hat[i] / km1);
            r.per_group.push_back({ms.size(i), std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN(), in.j_hat[i]});
            r.scores.push_back(scores[i].label());
        }
    }

    const Matrix perp = perp_matrix(block_projector(gamma_coef, p), block_projector(cross_coef, p), ups);
    r.statistic = delta.dot(perp * delta);
    detail::finalize(r);
    return r;
}

} // namespace sphanova
