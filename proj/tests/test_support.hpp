#pragma once

#include <random>

#include "sphanova.hpp"

namespace testing_support {

using sphanova::Matrix;
using sphanova::Vector;

/// Haar-ish random rotation from the QR factor of a Gaussian matrix.
inline Matrix random_rotation(Eigen::Index k, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    Matrix a(k, k);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(gen);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
}

inline Vector random_unit(Eigen::Index k, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    Vector v(k);
    for (Eigen::Index i = 0; i < k; ++i) v(i) = nd(gen);
    return v.normalized();
}

/// Null data: every group drawn around the same theta.
inline sphanova::MultiSample null_sample(const std::vector<sphanova::TildeLaw>& laws, const std::vector<Eigen::Index>& sizes,
                                         const sphanova::UnitVector& theta, sphanova::RngStream& rng) {
    std::vector<Matrix> groups;
    for (std::size_t i = 0; i < laws.size(); ++i) groups.push_back(sphanova::sample_rotsym(theta, laws[i], sizes[i], rng));
    return sphanova::MultiSample(std::move(groups));
}

} // namespace testing_support
