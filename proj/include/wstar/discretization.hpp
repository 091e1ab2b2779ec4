#pragma once

#include <cmath>

#include "wstar/metrics.hpp"

namespace wstar {

/// A time-domain kernel admitted by the Riemann schemes: either a translated
/// Fejer kernel f_{m,l}(t) = f_m(t) e^{itl} or the resolvent kernel
/// g_s(t) = 2 e^{-ist} / (e^{pi t} + e^{-pi t}) whose smearing is G_s.
struct KernelSpec {
    enum class Kind { fejer, g };
    Kind kind;
    double m = 0.0;  // fejer bandwidth
    double l = 0.0;  // fejer translate
    double s = 0.0;  // g parameter

    static KernelSpec fejer(double m, double l = 0.0) {
        if (!(m > 0.0)) throw NonPositiveBandwidth("fejer bandwidth must be > 0");
        return {Kind::fejer, m, l, 0.0};
    }
    static KernelSpec g(double s) { return {Kind::g, 0.0, 0.0, s}; }

    Complex value(double t) const {
        switch (kind) {
            case Kind::fejer: {
                double base = t == 0.0 ? m / (2.0 * M_PI)
                                       : (1.0 - std::cos(m * t)) / (M_PI * m * t * t);
                return base * std::exp(Complex(0.0, t * l));
            }
            case Kind::g:
                return std::exp(Complex(0.0, -s * t)) * (2.0 / (std::exp(M_PI * t) + std::exp(-M_PI * t)));
        }
        throw UnsupportedKernel("unknown kernel kind");
    }

    /// The multiplier of sigma_f: the Fourier transform at r.
    Complex hat(double r) const {
        switch (kind) {
            case Kind::fejer:
                return Complex(fejer_hat(m, l, r), 0.0);
            case Kind::g:
                return Complex(ModularCalculus::g_multiplier(s, r), 0.0);
        }
        throw UnsupportedKernel("unknown kernel kind");
    }

    double l1_norm() const { return 1.0; }

    /// ||1_{|t| >= n} f||_1 upper bound.
    double tail_l1(int n) const {
        switch (kind) {
            case Kind::fejer:
                return 8.0 / (M_PI * m * std::pow(static_cast<double>(n), 3));
            case Kind::g:
                return (4.0 / M_PI) * std::exp(-M_PI * n);
        }
        throw UnsupportedKernel("unknown kernel kind");
    }

    /// ||f'||_inf upper bound.
    double deriv_sup() const {
        switch (kind) {
            case Kind::fejer:
                return m * m / M_PI + std::abs(l) * m / (2.0 * M_PI);
            case Kind::g:
                return M_PI + std::abs(s);
        }
        throw UnsupportedKernel("unknown kernel kind");
    }
};

struct RiemannResult {
    Operator approx;
    double bound;
};

/// Riemann approximation of sigma_f(x) on the grid k/n^2, k = -n^3 .. n^3-1,
/// with the certified error bound
///   tail * ||x||* + (2 ||f||_1 / n^2) ||x||^# + (||f'||_inf / n) ||x||*.
inline RiemannResult riemann_sigma_f(const ModularCalculus& mc, const KernelSpec& f, int n,
                                     const Operator& x) {
    if (n < 1) throw BadRange("riemann grid needs n >= 1");
    const long n3 = static_cast<long>(n) * n * n;
    const double step = 1.0 / (static_cast<double>(n) * n);
    Operator approx = mc.apply_multiplier(
        [&](double r) {
            Complex acc(0.0, 0.0);
            for (long k = -n3; k < n3; ++k) {
                double t = static_cast<double>(k) * step;
                acc += f.value(t) * std::exp(Complex(0.0, t * r));
            }
            return step * acc;
        },
        x);
    double bound = f.tail_l1(n) * norm_star_spectral(mc, x) +
                   2.0 * f.l1_norm() * step * norm_sharp(mc, x) +
                   (f.deriv_sup() / static_cast<double>(n)) * norm_star_spectral(mc, x);
    return {approx, bound};
}

/// Exact sigma_f(x) via the multiplier (the oracle the Riemann sums approximate).
inline Operator sigma_f_exact(const ModularCalculus& mc, const KernelSpec& f, const Operator& x) {
    return mc.apply_multiplier([&](double r) { return f.hat(r); }, x);
}

/// Closed-form error allowances of the Riemann axioms; all are monotone
/// nonincreasing in n for n >= 2.
inline double axiom16_bound(double s, double m, int n) {
    double dn = n;
    return 8.0 * std::exp(-M_PI * dn) * m / M_PI + 4.0 * m / (dn * dn) +
           4.0 * (M_PI + std::abs(s)) * m / dn;
}

inline double axiom18_bound(double N, double l, double m, int n) {
    double dn = n;
    return 4.0 * m / (dn * dn) + 16.0 * m / (M_PI * N * dn * dn * dn) +
           std::abs(l) * N * m / (dn * M_PI) + 2.0 * m * N * N / (M_PI * dn);
}

inline double axiom19_bound(double alpha, double beta, double m, int n) {
    double eps = std::min(0.5 - alpha, 1.0 - beta - alpha);
    double delta = std::min(eps, alpha);
    double dn = n;
    return 4.0 * std::exp(-dn * delta) * m * m / (M_PI * delta) +
           std::abs(1.0 - std::exp(1.0 / (dn * dn))) * 2.0 * (3.0 + std::exp(eps / (dn * dn))) * m *
               m / (M_PI * delta);
}

inline double axiom20_bound(double alpha, int K, double m, int n) {
    double mu = 0.5 - alpha;
    double dn = n;
    double c = 1.0 + std::exp(1.5 * K);
    return 2.0 * std::exp(-dn * mu) * c * m * m / (M_PI * mu) +
           std::abs(1.0 - std::exp(1.0 / (dn * dn))) * (3.0 + std::exp(mu / (dn * dn))) * c * m * m /
               (M_PI * mu);
}

/// G_s(x) against its Riemann sum; returns max(0, d(G_s x, sum) - allowance).
inline double axiom16_check(const ModularCalculus& mc, double s, int n, const Operator& x,
                            double m) {
    auto [approx, lemma_bound] = riemann_sigma_f(mc, KernelSpec::g(s), n, x);
    (void)lemma_bound;
    double d = metric(mc, mc.g_map(s, x), approx);
    return std::max(0.0, d - axiom16_bound(s, m, n));
}

/// F_{N,l}(x) against its Riemann sum (the k = 0 term uses f_N(0) = N/(2 pi)).
inline double axiom18_check(const ModularCalculus& mc, double N, double l, int n,
                            const Operator& x, double m) {
    auto [approx, lemma_bound] = riemann_sigma_f(mc, KernelSpec::fejer(N, l), n, x);
    (void)lemma_bound;
    double d = metric(mc, fejer_map(mc, N, l, x), approx);
    return std::max(0.0, d - axiom18_bound(N, l, m, n));
}

struct FormCheck {
    Complex approx;
    Complex exact;
    double bound;
    double margin;
};

namespace detail {

/// (1/n^2)(cos(alpha pi)/2 pi) sum_k e^{alpha t_k} E_beta(G_{t_k}(F_K x), F_L y),
/// evaluated as a single weighted form.
inline Complex form_riemann_sum(const ModularCalculus& mc, double alpha, double beta, int n, int K,
                                int L, const Operator& x, const Operator& y) {
    const long n3 = static_cast<long>(n) * n * n;
    const double step = 1.0 / (static_cast<double>(n) * n);
    const double pref = step * std::cos(alpha * M_PI) / (2.0 * M_PI);
    Operator fx = fejer_map(mc, K, x);
    Operator fy = fejer_map(mc, L, y);
    return mc.weighted_form(
        [&](double r) {
            double acc = 0.0;
            for (long k = -n3; k < n3; ++k) {
                double t = static_cast<double>(k) * step;
                acc += std::exp(alpha * t) * ModularCalculus::g_multiplier(t, r);
            }
            return Complex(pref * std::exp(beta * r) * acc, 0.0);
        },
        fx, fy);
}

} // namespace detail

/// The recursion E_{alpha+beta}(F_K x, F_L y) ~ Riemann sum over
/// e^{alpha t} E_beta(G_t(F_K x), F_L y); bound per the (19) allowance.
inline FormCheck form_recursion(const ModularCalculus& mc, double alpha, double beta, int n, int K,
                                int L, const Operator& x, const Operator& y, double m) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw BadExponents("need 0 < alpha < 1/2");
    if (beta < 0.0 || alpha + beta >= 1.0) throw BadExponents("need 0 <= beta and alpha + beta < 1");
    Complex approx = detail::form_riemann_sum(mc, alpha, beta, n, K, L, x, y);
    Complex exact = mc.form_alpha(alpha + beta, fejer_map(mc, K, x), fejer_map(mc, L, y));
    double bound = axiom19_bound(alpha, beta, m, n);
    double margin = std::max(0.0, std::abs(approx - exact) - bound);
    return {approx, exact, bound, margin};
}

/// The alpha + beta = 1 case: the Riemann sum recovers phi(m_{L,K}(y, x*)).
inline FormCheck form_top_level(const ModularCalculus& mc, double alpha, int n, int K, int L,
                                const Operator& x, const Operator& y, double m) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw BadExponents("need 0 < alpha < 1/2");
    if (L > K) throw BadRange("form_top_level needs L <= K");
    Complex approx = detail::form_riemann_sum(mc, alpha, 1.0 - alpha, n, K, L, x, y);
    Complex exact = mc.model().state(smeared_product(mc, L, K, y, x.adjoint()));
    double bound = axiom20_bound(alpha, K, m, n);
    double margin = std::max(0.0, std::abs(approx - exact) - bound);
    return {approx, exact, bound, margin};
}

namespace detail {

/// Quadrature of (sin(alpha pi)/pi) int_0^inf s^{-alpha} (lambda + s + eps)^{-1} ds:
/// Simpson in u = ln s on [1e-8, 1e8](1+eps) plus series tails at both ends.
inline double resolvent_quadrature(double alpha, double eps, double lambda, int quad_points) {
    const double c = lambda + eps;
    const double a = 1e-8 * (1.0 + eps), b = 1e8 * (1.0 + eps);
    int seg = std::max(2, quad_points);
    if (seg % 2) ++seg;
    const double ua = std::log(a), ub = std::log(b), h = (ub - ua) / seg;
    auto f = [&](double u) {
        double sv = std::exp(u);
        return std::pow(sv, 1.0 - alpha) / (c + sv);
    };
    double acc = f(ua) + f(ub);
    for (int i = 1; i < seg; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(ua + i * h);
    double mid = acc * h / 3.0;
    double lower = std::pow(a, 1.0 - alpha) / ((1.0 - alpha) * c) -
                   std::pow(a, 2.0 - alpha) / ((2.0 - alpha) * c * c) +
                   std::pow(a, 3.0 - alpha) / ((3.0 - alpha) * c * c * c);
    double upper = std::pow(b, -alpha) / alpha - c * std::pow(b, -alpha - 1.0) / (alpha + 1.0) +
                   c * c * std::pow(b, -alpha - 2.0) / (alpha + 2.0);
    return std::sin(alpha * M_PI) / M_PI * (mid + lower + upper);
}

} // namespace detail

/// Max pointwise error of the resolvent-power quadrature over the model's
/// Delta-spectrum {e^{r_ij}} against the exact (e^r + eps)^{-alpha}.
inline double resolvent_power_formula(const ModularCalculus& mc, double alpha, double eps,
                                      int quad_points) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw BadExponents("need 0 < alpha < 1");
    if (!(eps > 0.0)) throw BadRange("need eps > 0");
    const RealMatrix& r = mc.log_ratios();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
            double lambda = std::exp(r(i, j));
            double quad = detail::resolvent_quadrature(alpha, eps, lambda, quad_points);
            double exact = std::pow(lambda + eps, -alpha);
            worst = std::max(worst, std::abs(quad - exact));
        }
    return worst;
}

} // namespace wstar
