#pragma once

#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "wstar/model.hpp"

namespace wstar {

/// Exact Tomita-Takesaki data for a WStarModel.
///
/// In the eigenbasis of rho the modular operator Delta acts on component
/// (i,j) of x as multiplication by p_i/p_j, so any Borel function of
/// ln(Delta) is an entrywise multiplier by f(r_ij), r_ij = ln(p_i/p_j).
class ModularCalculus {
public:
    explicit ModularCalculus(const WStarModel& model) : model_(&model) {
        const Eigen::Index n = model.dim();
        r_.resize(n, n);
        const RealVector& p = model.eigenvalues();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                r_(i, j) = std::log(p(i)) - std::log(p(j));
    }

    const WStarModel& model() const { return *model_; }
    const RealMatrix& log_ratios() const { return r_; }

    /// sigma_f realized exactly: component (i,j) of x in the eigenbasis is
    /// multiplied by f(r_ij).
    Operator apply_multiplier(const std::function<Complex(double)>& f, const Operator& x) const {
        model_->check_dim(x);
        const Eigen::Index n = model_->dim();
        Matrix t = model_->to_eigenbasis(x.mat());
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                Complex v = f(r_(i, j));
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw NonFiniteMultiplier("multiplier not finite at r = " + std::to_string(r_(i, j)));
                t(i, j) *= v;
            }
        return Operator(model_->from_eigenbasis(t));
    }

    /// sigma_t(x) = rho^{it} x rho^{-it}, multiplier e^{itr}.
    Operator modular_flow(double t, const Operator& x) const {
        return apply_multiplier([t](double r) { return std::exp(Complex(0.0, t * r)); }, x);
    }

    /// G_s = sigma_{g_s}; multiplier 2 e^{s/2} e^{r/2} / (e^r + e^s).
    Operator g_map(double s, const Operator& x) const {
        return apply_multiplier([s](double r) { return Complex(g_multiplier(s, r), 0.0); }, x);
    }

    static double g_multiplier(double s, double r) {
        // 2 e^{(s+r)/2} / (e^r + e^s), written to avoid overflow
        double h = (r - s) / 2.0;
        return 1.0 / std::cosh(h);
    }

    /// E_alpha(x,y) = <Delta^alpha (x xi), (y xi)>; conjugate-linear in x,
    /// linear in y; E_0 = gns_inner.
    Complex form_alpha(double alpha, const Operator& x, const Operator& y) const {
        return weighted_form([alpha](double r) { return Complex(std::exp(alpha * r), 0.0); }, x, y);
    }

    /// General weighted form  sum_{ij} w(r_ij) conj(x~_ij) y~_ij p_j.
    /// Equals <w(ln Delta)(x xi), y xi> for the GNS inner product.
    Complex weighted_form(const std::function<Complex(double)>& w, const Operator& x,
                          const Operator& y) const {
        model_->check_dim(x);
        model_->check_dim(y);
        const Eigen::Index n = model_->dim();
        Matrix xt = model_->to_eigenbasis(x.mat());
        Matrix yt = model_->to_eigenbasis(y.mat());
        const RealVector& p = model_->eigenvalues();
        Complex acc(0.0, 0.0);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                acc += w(r_(i, j)) * std::conj(xt(i, j)) * yt(i, j) * p(j);
        return acc;
    }

    /// ||w(ln Delta)(x xi)||^2 = sum |w(r_ij)|^2 |x~_ij|^2 p_j.
    double weighted_vector_norm_sq(const std::function<double(double)>& w, const Operator& x) const {
        model_->check_dim(x);
        const Eigen::Index n = model_->dim();
        Matrix xt = model_->to_eigenbasis(x.mat());
        const RealVector& p = model_->eigenvalues();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                double wv = w(r_(i, j));
                acc += wv * wv * std::norm(xt(i, j)) * p(j);
            }
        return acc;
    }

    /// Arveson spectrum of x: the set of log-ratios carried by components of
    /// magnitude > tol (relative to ||x||), merged within 1e-9.
    std::vector<double> arveson_spectrum(const Operator& x, double tol = -1.0) const {
        model_->check_dim(x);
        if (tol < 0.0) tol = 1e-12;  // relative default
        double cutoff = tol * x.opnorm();
        Matrix xt = model_->to_eigenbasis(x.mat());
        std::vector<double> pts;
        const Eigen::Index n = model_->dim();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (std::abs(xt(i, j)) > cutoff) pts.push_back(r_(i, j));
        std::sort(pts.begin(), pts.end());
        std::vector<double> merged;
        for (double v : pts) {
            if (merged.empty() || v - merged.back() > 1e-9)
                merged.push_back(v);
        }
        return merged;
    }

    /// Projection onto M(sigma, [-a, a]): zero all components with |r_ij| > a.
    Operator spectral_truncate(double a, const Operator& x) const {
        if (a < 0.0) throw BadRange("spectral_truncate needs a >= 0");
        return apply_multiplier(
            [a](double r) { return std::abs(r) <= a ? Complex(1.0, 0.0) : Complex(0.0, 0.0); }, x);
    }

    /// Largest |r_ij|; the spectral diameter of the model.
    double spectral_diameter() const { return r_.cwiseAbs().maxCoeff(); }

private:
    const WStarModel* model_;
    RealMatrix r_;
};

} // namespace wstar
