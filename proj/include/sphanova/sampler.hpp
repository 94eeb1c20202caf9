#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "sphanova/sphere.hpp"
#include "sphanova/tilde_law.hpp"

namespace sphanova {

/// Reproducible random stream identified by (seed, stream). Equal ids give
/// equal sequences on every platform; distinct streams may run on distinct
/// threads, but one stream must not be shared.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() { return normal_(engine_); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_;
};

/// Uniform draw on {v : |v| = 1, v'θ = 0}.
inline Vector sample_subsphere(const UnitVector& theta, RngStream& rng) {
    const Eigen::Index k = theta.dim();
    const Vector& t = theta.vec();
    while (true) {
        Vector z(k);
        for (Eigen::Index i = 0; i < k; ++i) z(i) = rng.normal();
        z -= t.dot(z) * t;
        const double n = z.norm();
        if (n > 1e-8) {
            z /= n;
            z -= t.dot(z) * t;  // second pass removes rounding along θ
            return z / z.norm();
        }
    }
}

/// n i.i.d. draws from the rotationally symmetric law with location theta,
/// as columns of a k x n matrix: X = Tθ + sqrt(1 - T²) S with T = F̃⁻¹(U).
inline Matrix sample_rotsym(const UnitVector& theta, const TildeLaw& law, Eigen::Index n, RngStream& rng) {
    if (n < 1) throw Error(Errc::DomainError, "sample size must be >= 1");
    if (law.k() != theta.dim()) throw Error(Errc::DimensionMismatch, "law and theta dimensions differ");
    Matrix out(theta.dim(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double psi = law.quantile_angle(rng.uniform());
        const Vector s = sample_subsphere(theta, rng);
        Vector x = std::cos(psi) * theta.vec() + std::sin(psi) * s;
        out.col(j) = x / x.norm();
    }
    return out;
}

} // namespace sphanova
