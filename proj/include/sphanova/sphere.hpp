#pragma once

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "sphanova/error.hpp"

namespace sphanova {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kUnitTolerance = 1e-12;
inline constexpr double kCollinearTolerance = 1e-12;
inline constexpr double kPinvTolerance = 1e-10;

/// A point of S^{k-1}, k >= 2. Construction checks the norm; use
/// `normalize` to project an arbitrary nonzero vector.
class UnitVector {
public:
    explicit UnitVector(Vector coords) : v_(std::move(coords)) {
        if (v_.size() < 2) throw Error(Errc::DimensionMismatch, "unit vectors need k >= 2");
        if (!(std::abs(v_.norm() - 1.0) <= kUnitTolerance))
            throw Error(Errc::NotUnit, "norm " + std::to_string(v_.norm()) + " is not 1");
    }
    UnitVector(std::initializer_list<double> xs) : UnitVector(from_list(xs)) {}

    static UnitVector normalize(const Vector& x) {
        const double n = x.norm();
        if (!(n > 0.0) || !std::isfinite(n)) throw Error(Errc::NotUnit, "cannot normalize a zero vector");
        return UnitVector(Vector(x / n));
    }

    static UnitVector basis(Eigen::Index k, Eigen::Index i) {
        Vector e = Vector::Zero(k);
        e(i) = 1.0;
        return UnitVector(std::move(e));
    }

    const Vector& vec() const noexcept { return v_; }
    operator const Vector&() const noexcept { return v_; }
    Eigen::Index dim() const noexcept { return v_.size(); }
    double operator()(Eigen::Index i) const { return v_(i); }

private:
    static Vector from_list(std::initializer_list<double> xs) {
        Vector v(static_cast<Eigen::Index>(xs.size()));
        Eigen::Index i = 0;
        for (double x : xs) v(i++) = x;
        return v;
    }

    Vector v_;
};

/// Element of SO(k).
class RotationMatrix {
public:
    explicit RotationMatrix(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols()) throw Error(Errc::DimensionMismatch, "rotation must be square");
        const Matrix gram = m_.transpose() * m_;
        if ((gram - Matrix::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff() > 1e-12 ||
            std::abs(m_.determinant() - 1.0) > 1e-12)
            throw Error(Errc::NotRotation, "matrix is not in SO(k)");
    }

    const Matrix& mat() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }

    UnitVector apply(const UnitVector& x) const { return UnitVector::normalize(m_ * x.vec()); }

private:
    Matrix m_;
};

/// (I - θθ')x
inline Vector tangent_project(const UnitVector& theta, const Vector& x) {
    if (theta.dim() != x.size()) throw Error(Errc::DimensionMismatch, "tangent_project");
    const Vector& t = theta.vec();
    return x - t.dot(x) * t;
}

/// Spherical sign of x about theta: the normalized tangent component.
inline Vector sign_vector(const Vector& theta, const Vector& x) {
    if (theta.size() != x.size()) throw Error(Errc::DimensionMismatch, "sign_vector");
    Vector r = x - theta.dot(x) * theta;
    const double n = r.norm();
    if (!(n > kCollinearTolerance)) throw Error(Errc::CollinearInput, "x is collinear with theta");
    return r / n;
}

inline UnitVector sign_vector(const UnitVector& theta, const UnitVector& x) {
    return UnitVector::normalize(sign_vector(theta.vec(), x.vec()));
}

/// Rotation by πξ/16 in the (e1, e2) plane. For k = 3 this is the O_ξ
/// family of the two-sample simulation design.
inline RotationMatrix rotation_xi(int xi, Eigen::Index k = 3) {
    if (k < 2) throw Error(Errc::DimensionMismatch, "rotation_xi needs k >= 2");
    const double a = std::numbers::pi * static_cast<double>(xi) / 16.0;
    Matrix m = Matrix::Identity(k, k);
    m(0, 0) = std::cos(a);
    m(0, 1) = -std::sin(a);
    m(1, 0) = std::sin(a);
    m(1, 1) = std::cos(a);
    return RotationMatrix(std::move(m));
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix through its
/// eigendecomposition; eigenvalues below tol * max|λ| count as zero.
inline Matrix pseudo_inverse(const Matrix& m, double tol = kPinvTolerance) {
    if (m.rows() != m.cols()) throw Error(Errc::DimensionMismatch, "pseudo_inverse needs a square matrix");
    if (m.size() == 0) return m;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw Error(Errc::NotSymmetric, "pseudo_inverse expects a symmetric matrix");
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const Vector& lambda = eig.eigenvalues();
    const double cutoff = tol * lambda.cwiseAbs().maxCoeff();
    Vector inv = Vector::Zero(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (std::abs(lambda(i)) > cutoff) inv(i) = 1.0 / lambda(i);
    const Matrix& v = eig.eigenvectors();
    return v * inv.asDiagonal() * v.transpose();
}

} // namespace sphanova
