#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sphanova/anova.hpp"
#include "sphanova/score.hpp"
#include "sphanova/tilde_law.hpp"

namespace sphanova {

/// Pitman ARE of the rank test with score K_{score} with respect to the
/// pseudo-FvML test, all groups sharing the true angular function.
inline double are_homogeneous(const ScoreFunction& score, const TildeLaw& truth) {
    const LawConstants c = law_constants(truth);
    const double km1 = static_cast<double>(truth.k() - 1);
    const double jx = j_cross(score, truth);
    return jx * jx / (km1 * km1 * score.information() * c.D * c.D * c.B);
}

inline double are_homogeneous(const AngularModel& score_model, const AngularModel& true_model, int k) {
    for (const auto* m : {&score_model, &true_model}) {
        const auto v = check_positive(*m);
        if (!v.ok) throw Error(*v.issue, v.message);
    }
    return are_homogeneous(score_from_model(score_model, k), TildeLaw(true_model, k));
}

struct AreTable {
    std::vector<AngularModel> truths;  // rows
    std::vector<AngularModel> scores;  // columns
    Matrix values;
};

inline std::vector<AngularModel> table1_truths() {
    return {AngularModel::fvml(1),  AngularModel::fvml(2),    AngularModel::fvml(6),
            AngularModel::lin(2),   AngularModel::lin(4),     AngularModel::log(2.5),
            AngularModel::log(4),   AngularModel::logis(1, 1), AngularModel::logis(2, 1)};
}

inline std::vector<AngularModel> table1_scores() {
    return {AngularModel::fvml(2),  AngularModel::fvml(6),     AngularModel::lin(2),     AngularModel::lin(4),
            AngularModel::log(2.5), AngularModel::logis(1, 1), AngularModel::logis(2, 1)};
}

inline AreTable are_table(std::vector<AngularModel> truths, std::vector<AngularModel> scores, int k) {
    AreTable t{std::move(truths), std::move(scores), Matrix()};
    t.values.resize(static_cast<Eigen::Index>(t.truths.size()), static_cast<Eigen::Index>(t.scores.size()));
    std::vector<ScoreFunction> sf;
    for (const auto& s : t.scores) sf.push_back(score_from_model(s, k));
    for (std::size_t i = 0; i < t.truths.size(); ++i) {
        const TildeLaw g(t.truths[i], k);
        for (std::size_t j = 0; j < sf.size(); ++j)
            t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = are_homogeneous(sf[j], g);
    }
    return t;
}

/// The 9 x 7 table of homogeneous AREs.
inline AreTable table1(int k = 3) { return are_table(table1_truths(), table1_scores(), k); }

/// Local alternative: group i located at θ + n_i^{-1/2} t_i, with t_i ⟂ θ.
struct NoncentralityInput {
    UnitVector theta;
    std::vector<Vector> shifts;
    std::vector<double> weights;  // r_i = n_i / n
    std::vector<TildeLaw> laws;   // true law of each group
};

namespace detail {

inline void check_noncentrality_input(const NoncentralityInput& in) {
    const std::size_t m = in.shifts.size();
    if (m < 2 || in.weights.size() != m || in.laws.size() != m)
        throw Error(Errc::DimensionMismatch, "noncentrality input needs m >= 2 matching shifts, weights and laws");
    for (std::size_t i = 0; i < m; ++i) {
        if (in.shifts[i].size() != in.theta.dim()) throw Error(Errc::DimensionMismatch, "shift dimension", i);
        if (in.laws[i].k() != in.theta.dim()) throw Error(Errc::DimensionMismatch, "law dimension", i);
        if (!(in.weights[i] > 0.0)) throw Error(Errc::DomainError, "weights must be positive", i);
        if (!(std::abs(in.theta.vec().dot(in.shifts[i])) <= 1e-10))
            throw Error(Errc::DomainError, "shift " + std::to_string(i) + " is not orthogonal to theta", i);
    }
}

inline double noncentrality(const NoncentralityInput& in, std::span<const double> gamma, std::span<const double> cross) {
    const Matrix p = projector(in.theta);
    const Eigen::Index k = in.theta.dim();
    Vector t(static_cast<Eigen::Index>(in.shifts.size()) * k);
    for (std::size_t i = 0; i < in.shifts.size(); ++i) t.segment(static_cast<Eigen::Index>(i) * k, k) = in.shifts[i];
    const Matrix g = block_projector(cross, p);
    const Matrix perp = perp_matrix(block_projector(gamma, p), g, upsilon(in.weights, p));
    const Vector gt = g * t;
    return std::max(0.0, gt.dot(perp * gt));
}

} // namespace detail

inline double noncentrality_pseudo(const NoncentralityInput& in) {
    detail::check_noncentrality_input(in);
    const double km1 = static_cast<double>(in.theta.dim() - 1);
    std::vector<double> gamma, cross;
    for (const auto& law : in.laws) {
        const LawConstants c = law_constants(law);
        gamma.push_back(c.B / km1);
        cross.push_back(c.C / km1);
    }
    return detail::noncentrality(in, gamma, cross);
}

inline double noncentrality_rank(const NoncentralityInput& in, std::span<const ScoreFunction> scores) {
    detail::check_noncentrality_input(in);
    if (scores.size() != in.laws.size()) throw Error(Errc::DimensionMismatch, "one score per group required");
    const double km1 = static_cast<double>(in.theta.dim() - 1);
    std::vector<double> gamma, cross;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        gamma.push_back(scores[i].information() / km1);
        cross.push_back(j_cross(scores[i], in.laws[i]) / km1);
    }
    return detail::noncentrality(in, gamma, cross);
}

} // namespace sphanova
