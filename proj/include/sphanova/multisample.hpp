#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sphanova/sphere.hpp"

namespace sphanova {

/// m >= 2 groups of unit vectors sharing a dimension k. Each group is a
/// k x n_i matrix whose columns are the observations.
class MultiSample {
public:
    explicit MultiSample(std::vector<Matrix> groups, std::vector<std::string> labels = {})
        : groups_(std::move(groups)), labels_(std::move(labels)) {
        if (groups_.size() < 2) throw Error(Errc::TooFewGroups, "need at least two groups");
        k_ = groups_.front().rows();
        if (k_ < 2) throw Error(Errc::DimensionMismatch, "need k >= 2");
        for (std::size_t i = 0; i < groups_.size(); ++i) {
            const Matrix& g = groups_[i];
            if (g.rows() != k_) throw Error(Errc::MixedDimensions, "group dimensions differ", i);
            if (g.cols() < 1) throw Error(Errc::DomainError, "empty group", i);
            for (Eigen::Index j = 0; j < g.cols(); ++j)
                if (!(std::abs(g.col(j).norm() - 1.0) <= 1e-9))
                    throw Error(Errc::NotUnit, "observation " + std::to_string(j) + " is not a unit vector", i);
            n_ += static_cast<std::size_t>(g.cols());
        }
        if (labels_.empty())
            for (std::size_t i = 0; i < groups_.size(); ++i) labels_.push_back(std::to_string(i + 1));
        if (labels_.size() != groups_.size()) throw Error(Errc::DomainError, "one label per group required");
    }

    std::size_t groups() const noexcept { return groups_.size(); }
    Eigen::Index dim() const noexcept { return k_; }
    const Matrix& group(std::size_t i) const { return groups_.at(i); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    std::size_t size(std::size_t i) const { return static_cast<std::size_t>(groups_.at(i).cols()); }
    std::size_t total() const noexcept { return n_; }
    double weight(std::size_t i) const { return static_cast<double>(size(i)) / static_cast<double>(n_); }

    /// Same sample with every observation premultiplied by `rot`.
    MultiSample rotated(const Matrix& rot) const {
        std::vector<Matrix> g;
        for (const auto& m : groups_) {
            Matrix r = rot * m;
            r.colwise().normalize();
            g.push_back(std::move(r));
        }
        return MultiSample(std::move(g), labels_);
    }

private:
    std::vector<Matrix> groups_;
    std::vector<std::string> labels_;
    Eigen::Index k_ = 0;
    std::size_t n_ = 0;
};

} // namespace sphanova
