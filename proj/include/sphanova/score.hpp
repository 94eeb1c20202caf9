#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sphanova/quadrature.hpp"
#include "sphanova/tilde_law.hpp"

namespace sphanova {

/// Score-generating function K : [0, 1] -> R with J(K) = ∫ K².
/// Model-derived scores keep their tilde law, K_f(u) = φ_f(F̃⁻¹(u)) sqrt(1 - F̃⁻¹(u)²).
class ScoreFunction {
public:
    ScoreFunction(std::string label, std::function<double(double)> k, double jk, std::optional<TildeLaw> law = {})
        : label_(std::move(label)), k_(std::move(k)), jk_(jk), law_(std::move(law)),
          cache_(std::make_shared<Cache>()) {}

    double operator()(double u) const { return k_(u); }
    double information() const noexcept { return jk_; }
    const std::string& label() const noexcept { return label_; }
    bool from_model() const noexcept { return law_.has_value(); }
    const std::optional<TildeLaw>& law() const noexcept { return law_; }

    /// K(r / (n + 1)) for r = 1..n, memoized per n. Safe to call from several threads.
    std::shared_ptr<const std::vector<double>> table(std::size_t n) const {
        std::lock_guard lock(cache_->mutex);
        auto& slot = cache_->tables[n];
        if (!slot) {
            auto t = std::make_shared<std::vector<double>>(n);
            for (std::size_t r = 1; r <= n; ++r)
                (*t)[r - 1] = k_(static_cast<double>(r) / static_cast<double>(n + 1));
            slot = std::move(t);
        }
        return slot;
    }

private:
    struct Cache {
        std::mutex mutex;
        std::map<std::size_t, std::shared_ptr<const std::vector<double>>> tables;
    };

    std::string label_;
    std::function<double(double)> k_;
    double jk_;
    std::optional<TildeLaw> law_;
    std::shared_ptr<Cache> cache_;
};

inline ScoreFunction score_from_model(const TildeLaw& law) {
    const double jk = law_constants(law).Jf;
    auto k = [law](double u) { return law.model().kernel_at_angle(law.quantile_angle(u)); };
    return ScoreFunction("K_" + law.model().label(), std::move(k), jk, law);
}

inline ScoreFunction score_from_model(const AngularModel& model, int k) {
    return score_from_model(TildeLaw(model, k));
}

/// Arbitrary continuous score; J(K) by adaptive quadrature on [0, 1].
inline ScoreFunction custom_score(std::string label, std::function<double(double)> k) {
    const double jk = quad::integrate([&](double u) { const double v = k(u); return v * v; }, 0.0, 1.0,
                                      quad::Tolerance{1e-12, 1e-12, 40});
    return ScoreFunction(std::move(label), std::move(k), jk);
}

/// Cross-information J(K, g) = ∫₀¹ K(u) K_g(u) du, computed in the t-domain
/// through u = G̃(t).
inline double j_cross(const ScoreFunction& score, const TildeLaw& g) {
    if (score.law() && score.law()->k() != g.k())
        throw Error(Errc::DimensionMismatch, "score and law have different dimensions");
    const AngularModel& gm = g.model();
    return g.expect_angle([&](double s) { return score(g.cdf_angle(s)) * gm.kernel_at_angle(s); });
}

} // namespace sphanova
