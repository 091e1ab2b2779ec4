#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "wstar/errors.hpp"

namespace wstar {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// An element of M_n(C) with its operator norm (largest singular value) cached.
/// Immutable value type.
class Operator {
public:
    Operator() = default;

    explicit Operator(Matrix m) : mat_(std::move(m)) {
        if (mat_.rows() != mat_.cols() || mat_.rows() < 1)
            throw BadDimension("operator matrix must be square and nonempty");
        opnorm_ = mat_.jacobiSvd().singularValues()(0);
    }

    static Operator identity(Eigen::Index n) { return Operator(Matrix::Identity(n, n)); }
    static Operator zero(Eigen::Index n) { return Operator(Matrix::Zero(n, n)); }

    /// Matrix unit e_{ij} (1-based logic not used; i, j are 0-based indices).
    static Operator unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
        Matrix m = Matrix::Zero(n, n);
        m(i, j) = Complex(1.0, 0.0);
        return Operator(std::move(m));
    }

    const Matrix& mat() const { return mat_; }
    double opnorm() const { return opnorm_; }
    Eigen::Index dim() const { return mat_.rows(); }

    Operator adjoint() const { return Operator(mat_.adjoint()); }

    Operator operator+(const Operator& o) const {
        check_dim(o);
        return Operator(mat_ + o.mat_);
    }
    Operator operator-(const Operator& o) const {
        check_dim(o);
        return Operator(mat_ - o.mat_);
    }
    Operator operator*(const Operator& o) const {
        check_dim(o);
        return Operator(mat_ * o.mat_);
    }
    friend Operator operator*(Complex lambda, const Operator& o) {
        return Operator(lambda * o.mat_);
    }
    friend Operator operator*(double lambda, const Operator& o) {
        return Operator(lambda * o.mat_);
    }

    void check_dim(const Operator& o) const {
        if (dim() != o.dim()) throw DimensionMismatch("operator dimensions differ");
    }

private:
    Matrix mat_;
    double opnorm_ = 0.0;
};

} // namespace wstar
