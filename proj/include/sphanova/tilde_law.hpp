#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "sphanova/angular_model.hpp"
#include "sphanova/error.hpp"
#include "sphanova/quadrature.hpp"

namespace sphanova {

/// Law of the projection T = X'θ when X has angular function f on S^{k-1}:
/// density ∝ f(t)(1 - t²)^{(k-3)/2} on [-1, 1].
///
/// Everything is computed in the angle ψ = arccos t, where the weight becomes
/// sin^{k-2}ψ and has no endpoint singularity for any k >= 2. The cdf is
/// tabulated on 2048 equal ψ-panels; quantiles start from a monotone cubic
/// interpolant of that table and are polished by safeguarded Newton steps.
/// Instances are immutable and cheap to copy.
class TildeLaw {
public:
    static constexpr int kPanels = 2048;

    TildeLaw(AngularModel model, int k) {
        if (k < 2) throw Error(Errc::DimensionMismatch, "tilde law needs k >= 2");
        if (auto r = check_positive(model); !r) throw Error(*r.issue, r.message);
        auto impl = std::make_shared<Impl>(std::move(model), k);
        impl->monotone = validate(impl->model).ok;
        impl->build();
        impl_ = std::move(impl);
    }

    const AngularModel& model() const noexcept { return impl_->model; }
    int k() const noexcept { return impl_->k; }
    /// Constant c with ∫ c f(t)(1 - t²)^{(k-3)/2} dt = 1 (for f as stored).
    double normalizer() const noexcept { return 1.0 / impl_->mass; }
    /// Whether the angular function passed the monotonicity check.
    bool monotone() const noexcept { return impl_->monotone; }

    double density(double t) const {
        if (t < -1.0 || t > 1.0) return 0.0;
        const double s2 = (1.0 - t) * (1.0 + t);
        return impl_->model.f(t) * std::pow(s2, 0.5 * (impl_->k - 3)) / impl_->mass;
    }

    double cdf(double t) const {
        if (t <= -1.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return cdf_angle(std::acos(t));
    }

    /// P(T <= cos psi).
    double cdf_angle(double psi) const {
        if (psi >= std::numbers::pi) return 0.0;
        if (psi <= 0.0) return 1.0;
        const Impl& d = *impl_;
        const auto j = d.panel_of(psi);
        const double partial = quad::gauss_legendre([&](double s) { return d.weight(s); }, psi, d.psi[j]);
        return std::clamp(d.cum[j] + partial / d.mass, 0.0, 1.0);
    }

    double quantile(double u) const { return std::cos(quantile_angle(u)); }

    /// ψ with cdf_angle(ψ) = u.
    double quantile_angle(double u) const {
        if (!(u > 0.0)) return std::numbers::pi;
        if (u >= 1.0) return 0.0;
        const Impl& d = *impl_;
        const auto it = std::upper_bound(d.cum.begin(), d.cum.end(), u);
        auto j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - d.cum.begin()) - 1));
        j = std::min<std::size_t>(j, kPanels - 1);

        double hi = d.psi[j], lo = d.psi[j + 1];  // cdf_angle(hi) <= u <= cdf_angle(lo)
        double x = d.interpolate(j, u);
        for (int iter = 0; iter < 60; ++iter) {
            const double g = cdf_angle(x) - u;
            if (g == 0.0) return x;
            if (g > 0.0) lo = x; else hi = x;
            const double slope = -d.weight(x) / d.mass;
            double next = slope != 0.0 ? x - g / slope : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - x) < 1e-15 || hi - lo < 1e-14) return next;
            x = next;
        }
        return x;
    }

    /// E[g(ψ)] where ψ = arccos T.
    template <typename G>
    double expect_angle(G&& g) const {
        const Impl& d = *impl_;
        auto integrand = [&](double s) { return g(s) * d.weight(s); };
        const quad::Tolerance tol{1e-13 * d.mass, 1e-12, 40};
        return quad::integrate(integrand, 0.0, std::numbers::pi, tol, d.breaks) / d.mass;
    }

    /// E[g(T)].
    template <typename G>
    double expect(G&& g) const {
        return expect_angle([&](double s) { return g(std::cos(s)); });
    }

private:
    struct Impl {
        AngularModel model;
        int k;
        bool monotone = true;
        double mass = 0.0;
        std::vector<double> psi;    // psi[j] = π(1 - j/N), decreasing
        std::vector<double> cum;    // normalized cdf at psi[j], increasing
        std::vector<double> slope;  // dψ/du at the nodes
        std::vector<double> breaks; // ψ at mass quantiles, increasing

        Impl(AngularModel m, int kk) : model(std::move(m)), k(kk) {}

        double weight(double s) const {
            const double sn = std::sin(s);
            const double w = model.f_at_angle(s);
            return k == 2 ? w : w * std::pow(sn, k - 2);
        }

        std::size_t panel_of(double s) const {
            const double pos = (std::numbers::pi - s) / std::numbers::pi * kPanels;
            const auto j = static_cast<std::ptrdiff_t>(std::floor(pos));
            return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j, 0, kPanels - 1));
        }

        void build() {
            psi.resize(kPanels + 1);
            for (int j = 0; j <= kPanels; ++j) psi[j] = std::numbers::pi * (1.0 - static_cast<double>(j) / kPanels);
            psi[kPanels] = 0.0;
            cum.assign(kPanels + 1, 0.0);
            auto w = [this](double s) { return weight(s); };
            const quad::Tolerance tol{1e-300, 1e-12, 40};
            for (int j = 0; j < kPanels; ++j) cum[j + 1] = cum[j] + quad::integrate(w, psi[j + 1], psi[j], tol);
            mass = cum[kPanels];
            if (!(mass > 0.0) || !std::isfinite(mass))
                throw Error(Errc::QuadratureFailure, model.label() + ": normalizing integral is not finite");
            for (double& c : cum) c /= mass;
            cum[kPanels] = 1.0;

            // Fritsch-Butland harmonic-mean slopes keep the interpolant monotone.
            std::vector<double> secant(kPanels);
            for (int j = 0; j < kPanels; ++j) {
                const double h = cum[j + 1] - cum[j];
                secant[j] = h > 0.0 ? (psi[j + 1] - psi[j]) / h : -std::numeric_limits<double>::infinity();
            }
            slope.assign(kPanels + 1, 0.0);
            slope[0] = secant[0];
            slope[kPanels] = secant[kPanels - 1];
            for (int j = 1; j < kPanels; ++j) slope[j] = 2.0 / (1.0 / secant[j - 1] + 1.0 / secant[j]);

            for (int q = 1; q < 32; ++q) {
                const auto it = std::upper_bound(cum.begin(), cum.end(), q / 32.0);
                breaks.push_back(psi[static_cast<std::size_t>(it - cum.begin()) - 1]);
            }
            std::sort(breaks.begin(), breaks.end());
            breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        }

        double interpolate(std::size_t j, double u) const {
            const double h = cum[j + 1] - cum[j];
            const double a = psi[j], b = psi[j + 1];
            if (!(h > 0.0)) return 0.5 * (a + b);
            const double s = (u - cum[j]) / h;
            const double s2 = s * s, s3 = s2 * s;
            const double x = (2 * s3 - 3 * s2 + 1) * a + (s3 - 2 * s2 + s) * h * slope[j] +
                             (-2 * s3 + 3 * s2) * b + (s3 - s2) * h * slope[j + 1];
            if (std::isfinite(x) && x >= b && x <= a) return x;
            return a + s * (b - a);
        }
    };

    std::shared_ptr<const Impl> impl_;
};

/// Moment and information constants of a tilde law.
struct LawConstants {
    double B = 0.0;   // 1 - E[T²]
    double E = 0.0;   // E[T]
    double C = 0.0;   // E[(1 - T²) φ(T)]
    double D = 0.0;   // E / B
    double Jf = 0.0;  // E[φ²(T)(1 - T²)]
};

inline LawConstants law_constants(const TildeLaw& law) {
    const AngularModel& m = law.model();
    LawConstants c;
    c.E = law.expect_angle([](double s) { return std::cos(s); });
    c.B = law.expect_angle([](double s) { const double x = std::sin(s); return x * x; });
    c.C = law.expect_angle([&](double s) { return std::sin(s) * m.kernel_at_angle(s); });
    c.Jf = law.expect_angle([&](double s) { const double x = m.kernel_at_angle(s); return x * x; });
    c.D = c.E / c.B;
    if (!std::isfinite(c.C) || !std::isfinite(c.Jf))
        throw Error(Errc::QuadratureFailure, m.label() + ": information integrals are not finite");
    return c;
}

} // namespace sphanova
