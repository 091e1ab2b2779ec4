#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "wstar/operator.hpp"

namespace wstar {

/// A finite-dimensional W*-probability space: M_n(C) with a faithful state
/// given by a full-rank density matrix rho.  Immutable after construction.
///
/// rho = U diag(p) U* with p sorted in decreasing order; U is the basis
/// change to the eigenbasis used by the modular calculus.
class WStarModel {
public:
    static constexpr double kHermitianTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kFaithfulnessFloor = 1e-10;

    static WStarModel from_eigenvalues(const std::vector<double>& p) {
        const Eigen::Index n = static_cast<Eigen::Index>(p.size());
        if (n < 1) throw BadDimension("eigenvalue list must be nonempty");
        double tr = std::accumulate(p.begin(), p.end(), 0.0);
        if (std::abs(tr - 1.0) > kTraceTol)
            throw NotUnitTrace("eigenvalues sum to " + std::to_string(tr));
        for (double v : p)
            if (!(v > kFaithfulnessFloor))
                throw NotFaithful("eigenvalue " + std::to_string(v) + " below faithfulness floor");
        RealVector pv(n);
        for (Eigen::Index i = 0; i < n; ++i) pv(i) = p[static_cast<std::size_t>(i)];
        // diagonal rho, sorted decreasing
        std::sort(pv.data(), pv.data() + n, std::greater<double>());
        Matrix rho = pv.cast<Complex>().asDiagonal();
        return WStarModel(std::move(rho), pv, Matrix::Identity(n, n));
    }

    static WStarModel from_matrix(const Matrix& rho) {
        const Eigen::Index n = rho.rows();
        if (n < 1 || rho.cols() != n) throw BadDimension("rho must be square and nonempty");
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
            throw NotHermitian("rho deviates from rho* entrywise");
        Complex tr = rho.trace();
        if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol)
            throw NotUnitTrace("trace(rho) = " + std::to_string(tr.real()));
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
        RealVector p = es.eigenvalues();
        Matrix u = es.eigenvectors();
        for (Eigen::Index i = 0; i < n; ++i)
            if (!(p(i) > kFaithfulnessFloor))
                throw NotFaithful("eigenvalue " + std::to_string(p(i)) + " below faithfulness floor");
        // sort decreasing, permuting columns of u accordingly
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return p(a) > p(b); });
        RealVector ps(n);
        Matrix us(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            ps(i) = p(idx[static_cast<std::size_t>(i)]);
            us.col(i) = u.col(idx[static_cast<std::size_t>(i)]);
        }
        return WStarModel(rho, ps, us);
    }

    Eigen::Index dim() const { return rho_.rows(); }
    const Matrix& rho() const { return rho_; }
    const RealVector& eigenvalues() const { return p_; }
    const Matrix& basis() const { return u_; }

    /// phi(x) = Tr(rho x)
    Complex state(const Operator& x) const {
        check_dim(x);
        return (rho_ * x.mat()).trace();
    }

    /// <x,y> = phi(x* y); conjugate-linear in x, linear in y.
    Complex gns_inner(const Operator& x, const Operator& y) const {
        check_dim(x);
        check_dim(y);
        return (rho_ * x.mat().adjoint() * y.mat()).trace();
    }

    /// Membership in the domain of quantification D_m (operator norm ball).
    bool in_domain(const Operator& x, double m) const {
        check_dim(x);
        return x.opnorm() <= m + 1e-12;
    }

    Operator identity() const { return Operator::identity(dim()); }
    Operator zero() const { return Operator::zero(dim()); }

    void check_dim(const Operator& x) const {
        if (x.dim() != dim()) throw DimensionMismatch("operator does not match model dimension");
    }

    Matrix to_eigenbasis(const Matrix& m) const { return u_.adjoint() * m * u_; }
    Matrix from_eigenbasis(const Matrix& m) const { return u_ * m * u_.adjoint(); }

private:
    WStarModel(Matrix rho, RealVector p, Matrix u)
        : rho_(std::move(rho)), p_(std::move(p)), u_(std::move(u)) {
        // eigen-reconstruction sanity check
        Matrix rec = u_ * p_.cast<Complex>().asDiagonal() * u_.adjoint();
        double err = Operator(rec - rho_).opnorm();
        if (err > 1e-10) throw BadDimension("eigendecomposition reconstruction error too large");
    }

    Matrix rho_;
    RealVector p_;
    Matrix u_;
};

/// build_model from an eigenvalue list (produces diagonal rho) or a full matrix.
inline WStarModel build_model(const std::vector<double>& eigenvalues) {
    return WStarModel::from_eigenvalues(eigenvalues);
}
inline WStarModel build_model(const Matrix& rho) { return WStarModel::from_matrix(rho); }

} // namespace wstar
