#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "wstar/discretization.hpp"

namespace wstar {

// ---------------------------------------------------------------------------
// The variational quadratic form psi'_{K,L,u}

enum class PsiMode { spectral, minimizer, numeric };

struct PsiResult {
    double value = 0.0;
    Operator argmin;
};

/// Radius certified for the closed-form minimizer when x, y lie in D_1.
inline double psi_minimizer_radius(int K, int L, double u) {
    return 3.0 * (std::exp(static_cast<double>(K)) + std::exp(static_cast<double>(L))) /
           (2.0 * std::sqrt(u));
}

namespace detail {

inline Operator psi_smeared_sum(const ModularCalculus& mc, int K, int L, const Operator& x,
                                const Operator& y) {
    return fejer_map(mc, K, y) + fejer_map(mc, L, x);
}

inline double psi_objective(const WStarModel& m, double u, const Operator& X, const Operator& z) {
    Operator r = X + (-1.0) * z;
    return m.state(z.adjoint() * z).real() + m.state(r * r.adjoint()).real() / u;
}

} // namespace detail

/// ||Delta^{1/2}(u+Delta)^{-1/2} X xi||^2 with X = F_K(y) + F_L(x), evaluated
/// spectrally, at the closed-form minimizer z = Delta(u+Delta)^{-1}(X), or by
/// a plain gradient descent on the quadratic objective.
inline PsiResult psi_variational(const ModularCalculus& mc, int K, int L, double u,
                                 const Operator& x, const Operator& y,
                                 PsiMode mode = PsiMode::spectral) {
    if (!(u > 0.0)) throw NonPositiveU("psi needs u > 0");
    const WStarModel& m = mc.model();
    Operator X = detail::psi_smeared_sum(mc, K, L, x, y);
    auto min_multiplier = [u](double r) {
        double lam = std::exp(r);
        return Complex(lam / (u + lam), 0.0);
    };
    Operator z = mc.apply_multiplier(min_multiplier, X);
    switch (mode) {
        case PsiMode::spectral: {
            double v = mc.weighted_form([u](double r) { double l = std::exp(r); return l / (u + l); },
                                        X, X)
                           .real();
            return {v, z};
        }
        case PsiMode::minimizer:
            return {detail::psi_objective(m, u, X, z), z};
        case PsiMode::numeric: {
            // exact-line-search gradient descent on the per-entry quadratic
            const Eigen::Index d = m.dim();
            Matrix Xb = m.to_eigenbasis(X.mat());
            Matrix zb = Matrix::Zero(d, d);
            const RealVector& p = m.eigenvalues();
            for (int it = 0; it < 200; ++it) {
                Matrix g(d, d);
                double gHg = 0.0, gg = 0.0;
                for (Eigen::Index i = 0; i < d; ++i)
                    for (Eigen::Index j = 0; j < d; ++j) {
                        double h = p(j) + p(i) / u;
                        g(i, j) = h * zb(i, j) - (p(i) / u) * Xb(i, j);
                        gg += std::norm(g(i, j));
                        gHg += h * std::norm(g(i, j));
                    }
                if (gg < 1e-30 || gHg <= 0.0) break;
                zb -= (gg / gHg) * g;
            }
            Operator zn(m.from_eigenbasis(zb));
            return {detail::psi_objective(m, u, X, zn), zn};
        }
    }
    throw BadParameters("unknown psi mode");
}

// ---------------------------------------------------------------------------
// The sesquilinear forms psi and their resolvent products

/// Language-level route: (1/(2*sqrt(u))) E_{1/2}(F_K(y), G_{ln u}(F_L(x))).
inline Complex psi_form(const ModularCalculus& mc, int K, int L, double u, const Operator& x,
                        const Operator& y) {
    if (!(u > 0.0)) throw NonPositiveU("psi needs u > 0");
    return mc.form_alpha(0.5, fejer_map(mc, K, y), mc.g_map(std::log(u), fejer_map(mc, L, x))) /
           (2.0 * std::sqrt(u));
}

/// Oracle: phi(F_K(y^*) . Delta(u+Delta)^{-1} F_L(x)) as one spectral sum.
inline Complex psi_form_spectral(const ModularCalculus& mc, int K, int L, double u,
                                 const Operator& x, const Operator& y) {
    if (!(u > 0.0)) throw NonPositiveU("psi needs u > 0");
    return mc.weighted_form([u](double r) { double l = std::exp(r); return l / (u + l); },
                            fejer_map(mc, K, y), fejer_map(mc, L, x));
}

struct PsiMultiResult {
    Complex constructive{};
    Complex spectral{};
    double perturbation_bound = 0.0;  // allowance used to separate coincident u's
};

/// phi(F_K(y^*) . Delta (u_1+Delta)^{-1}...(u_n+Delta)^{-1} F_L(x)).  The
/// constructive route expands the resolvent product by partial fractions;
/// coincident entries are separated by epsilon and the stated perturbation
/// bound eps m^2 / (u_1...u_n (u_i+eps)) is reported.
inline PsiMultiResult psi_multi(const ModularCalculus& mc, int K, int L, std::vector<double> us,
                                const Operator& x, const Operator& y, double eps = 1e-6) {
    if (us.empty()) throw BadParameters("psi_multi needs at least one u");
    for (double u : us)
        if (!(u > 0.0)) throw NonPositiveU("psi_multi needs positive u's");
    PsiMultiResult out;
    out.spectral = mc.weighted_form(
        [&us](double r) {
            double l = std::exp(r), w = l;
            for (double u : us) w /= (u + l);
            return w;
        },
        fejer_map(mc, K, y), fejer_map(mc, L, x));

    // separate duplicates; track the total perturbation allowance
    double m = std::max(1.0, std::max(x.opnorm(), y.opnorm()));
    std::vector<double> sep = us;
    for (std::size_t i = 0; i < sep.size(); ++i) {
        int bump = 0;
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(us[i] - us[j]) < eps / 2.0) ++bump;
        if (bump > 0) {
            sep[i] += bump * eps;
            double denom = sep[i];
            for (std::size_t j = 0; j < us.size(); ++j)
                if (j != i) denom *= us[j];
            out.perturbation_bound += bump * eps * m * m / denom;
        }
    }
    for (std::size_t i = 0; i < sep.size(); ++i) {
        double c = 1.0;
        for (std::size_t j = 0; j < sep.size(); ++j)
            if (j != i) c /= (sep[j] - sep[i]);
        out.constructive += c * psi_form_spectral(mc, K, L, sep[i], x, y);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Chain maps A, B, C, E

enum class ChainMap { A_res, B_pow, C_log, E_exp };

struct ChainMapParams {
    double u = 0.5;
    double t = 0.25;    // B exponent / E time
    double beta = 0.0;  // C / E resolvent shift
    int K = 1;
    int quad_points = 10000;
    int k_max = 40;     // E series truncation
};

struct ChainMapResult {
    Operator approx;
    Operator exact;
    double remainder = 0.0;  // declared truncation allowance for the approx
};

inline double b_norm_allowance(double u, double t, int K, double m) {
    return 8.0 * m * std::exp(static_cast<double>(K)) * std::pow(u, -0.5 - t);
}

/// The C-stage validity window beta + 2 ln(u) > 4K + 2 ln(24) + 2.
inline double c_window_floor(double u, int K) {
    return 4.0 * K + 2.0 * std::log(24.0) + 2.0 - 2.0 * std::log(u);
}

namespace detail {

inline double log_shift(double u, double r) { return std::log(u + std::exp(r)); }

/// integral_0^infty dv e^{-beta v} (u+lambda)^{-v} = 1/(beta + ln(u+lambda)),
/// Simpson in v on [0, V] plus the exact exponential tail.
inline double c_quadrature(double beta, double rate_log, int qp) {
    double rate = beta + rate_log;
    double V = 40.0 / rate;
    int n = std::max(64, qp / 4);
    if (n % 2) ++n;
    double h = V / n, acc = 0.0;
    auto f = [&](double v) { return std::exp(-rate * v); };
    for (int i = 0; i <= n; ++i) {
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f(i * h);
    }
    acc *= h / 3.0;
    acc += f(V) / rate;  // exact tail
    return acc;
}

} // namespace detail

inline ChainMapResult chain_map(const ModularCalculus& mc, ChainMap which,
                                const ChainMapParams& p, const Operator& x) {
    if (!(p.u > 0.0)) throw NonPositiveU("chain maps need u > 0");
    const double u = p.u;
    const int K = p.K;
    auto hatK = [K](double r) { return fejer_hat(K, 0.0, r); };
    switch (which) {
        case ChainMap::A_res: {
            Operator exact = mc.apply_multiplier(
                [&](double r) { return Complex(hatK(r) / (u + std::exp(r)), 0.0); }, x);
            // A = u^{-1} F_K - (1/(2 u sqrt(u))) Delta^{1/2} G_{ln u} F_K
            Operator fk = fejer_map(mc, K, x);
            Operator g = mc.g_map(std::log(u), fk);
            Operator half = mc.apply_multiplier(
                [](double r) { return Complex(std::exp(r / 2.0), 0.0); }, g);
            Operator approx = (1.0 / u) * fk + (-1.0 / (2.0 * u * std::sqrt(u))) * half;
            return {approx, exact, 0.0};
        }
        case ChainMap::B_pow: {
            if (!(p.t > 0.0)) throw ParameterWindowViolation("B_pow needs t > 0");
            double t = p.t;
            int n = 1;
            while (t >= 0.5 * n) ++n;  // composition count so that t/n < 1/2
            double s = t / n;
            auto b_quad = [&](int band) {
                return [&, band](double r) {
                    return Complex(fejer_hat(band, 0.0, r) *
                                       detail::resolvent_quadrature(s, std::exp(r), u, p.quad_points),
                                   0.0);
                };
            };
            Operator exact = mc.apply_multiplier(
                [&](double r) { return Complex(hatK(r) * std::pow(u + std::exp(r), -t), 0.0); }, x);
            // B_{u,t,K} = (2 B_{u,t/n,2K} - B_{u,t/n,K})^{o(n-1)} o B_{u,t/n,K}
            Operator acc = mc.apply_multiplier(b_quad(K), x);
            for (int step = 1; step < n; ++step)
                acc = 2.0 * mc.apply_multiplier(b_quad(2 * K), acc) - mc.apply_multiplier(b_quad(K), acc);
            // scalar quadrature error per eigenvalue pair, inflated through the
            // n-fold composition (each factor has multiplier modulus <= u^{-s})
            double scalar_err = 5e-9 * std::max(1.0, std::pow(u, -s));
            double rem = mc.model().dim() * x.opnorm() * scalar_err * n *
                         std::pow(3.0 * std::max(1.0, std::pow(u, -s)), n - 1);
            return {acc, exact, rem};
        }
        case ChainMap::C_log: {
            if (!(p.beta + 2.0 * std::log(u) > 4.0 * K + 2.0 * std::log(24.0) + 2.0))
                throw ParameterWindowViolation(
                    "C_log needs beta + 2 ln(u) > 4K + 2 ln(24) + 2; floor is " +
                    std::to_string(c_window_floor(u, K)));
            Operator exact = mc.apply_multiplier(
                [&](double r) {
                    return Complex(hatK(r) / (p.beta + detail::log_shift(u, r)), 0.0);
                },
                x);
            Operator approx = mc.apply_multiplier(
                [&](double r) {
                    return Complex(hatK(r) * detail::c_quadrature(p.beta, detail::log_shift(u, r),
                                                                  p.quad_points),
                                   0.0);
                },
                x);
            return {approx, exact, 1e-9 * mc.model().dim() * x.opnorm()};
        }
        case ChainMap::E_exp: {
            double floor_needed = c_window_floor(u, 2 * K + 2);
            if (!(p.beta > floor_needed))
                throw ParameterWindowViolation("E_exp needs beta above the C window of band 2K+2: " +
                                               std::to_string(floor_needed));
            const double beta = p.beta, t = p.t;
            Operator exact = mc.apply_multiplier(
                [&](double r) {
                    double L = detail::log_shift(u, r);
                    return Complex(hatK(r), 0.0) *
                           std::exp(Complex(0.0, t * beta * L / (beta + L)));
                },
                x);
            auto gen = [&](int band, const Operator& w) {
                // beta (F_band - beta C_{u,beta,band})
                Operator fb = fejer_map(mc, band, w);
                Operator cb = mc.apply_multiplier(
                    [&](double r) {
                        return Complex(fejer_hat(band, 0.0, r) /
                                           (beta + detail::log_shift(u, r)),
                                       0.0);
                    },
                    w);
                return beta * (fb + (-beta) * cb);
            };
            Operator acc = fejer_map(mc, K, x);
            Operator term = gen(K, x);
            Complex it_pow(0.0, t);
            double fact = 1.0;
            for (int k = 0; k < p.k_max; ++k) {
                acc = acc + (it_pow / fact) * term;
                term = 2.0 * gen(2 * K + 2, term) + (-1.0) * gen(K + 1, term);
                it_pow *= Complex(0.0, t);
                fact *= (k + 2.0);
            }
            // remainder: |t L|^{k}/k! tail with |L| the largest log multiplier
            double Lmax = std::max(std::abs(std::log(u + std::exp(-mc.spectral_diameter()))),
                                   std::abs(detail::log_shift(u, mc.spectral_diameter())));
            double q = t * Lmax;
            double rem = std::pow(q, p.k_max + 1) / std::tgamma(p.k_max + 2.0) * std::exp(q) *
                         mc.model().dim() * x.opnorm();
            return {acc, exact, rem};
        }
    }
    throw BadParameters("unknown chain map");
}

// ---------------------------------------------------------------------------
// The F-form tower and the sigma distance

enum class FormStage { F_ubt, F_ut, F_t_finiteKL, F_t };

struct FormStageParams {
    double u = 0.5;
    double beta = 0.0;
    double t = 0.25;
    int K = 1, L = 1;
};

struct FormStageResult {
    Complex value{};
    double neighbor_gap = 0.0;  // |this stage - the next stage toward F_t|
    double bound = 0.0;         // quoted allowance for that transition
};

namespace detail {

inline Complex f_stage_value(const ModularCalculus& mc, FormStage stage, const FormStageParams& p,
                             const Operator& x, const Operator& y) {
    const double u = p.u, beta = p.beta, t = p.t;
    auto metric_weight = [](double r) { double l = std::exp(r); return l / (1.0 + l); };
    switch (stage) {
        case FormStage::F_ubt:
            return mc.weighted_form(
                [&](double r) {
                    double L = log_shift(u, r);
                    return Complex(metric_weight(r) * fejer_hat(p.K, 0.0, r), 0.0) *
                           std::exp(Complex(0.0, t * beta * L / (beta + L)));
                },
                fejer_map(mc, p.L, y), x);
        case FormStage::F_ut:
            return mc.weighted_form(
                [&](double r) {
                    return Complex(metric_weight(r) * fejer_hat(p.K, 0.0, r), 0.0) *
                           std::exp(Complex(0.0, t * log_shift(u, r)));
                },
                fejer_map(mc, p.L, y), x);
        case FormStage::F_t_finiteKL:
            return mc.weighted_form(
                [&](double r) {
                    return Complex(metric_weight(r) * fejer_hat(p.K, 0.0, r), 0.0) *
                           std::exp(Complex(0.0, t * r));
                },
                fejer_map(mc, p.L, y), x);
        case FormStage::F_t:
            return mc.weighted_form(
                [&](double r) {
                    return Complex(metric_weight(r), 0.0) * std::exp(Complex(0.0, t * r));
                },
                y, x);
    }
    throw BadParameters("unknown form stage");
}

} // namespace detail

/// One rung of the Duhamel ladder from E-exponentials down to
/// F_t(x,y) = phi(y^* Delta(1+Delta)^{-1} sigma_t(x)), with the quoted
/// transition bound.
inline FormStageResult f_forms(const ModularCalculus& mc, FormStage stage,
                               const FormStageParams& p, const Operator& x, const Operator& y) {
    if (!(p.u > 0.0)) throw NonPositiveU("f_forms needs u > 0");
    if (stage == FormStage::F_ubt && !(p.beta > c_window_floor(p.u, 2 * p.K + 2)))
        throw ParameterWindowViolation("F_ubt needs beta above the E window");
    FormStageResult out;
    out.value = detail::f_stage_value(mc, stage, p, x, y);
    const double nx = norm_phi(mc, x), ny = norm_phi(mc, y);
    switch (stage) {
        case FormStage::F_ubt: {
            Complex next = detail::f_stage_value(mc, FormStage::F_ut, p, x, y);
            out.neighbor_gap = std::abs(out.value - next);
            out.bound = (p.t / p.beta) * std::log(p.u + std::exp(p.L)) *
                        std::log(p.u + std::exp(p.K)) * ny * nx;
            break;
        }
        case FormStage::F_ut: {
            Complex next = detail::f_stage_value(mc, FormStage::F_t_finiteKL, p, x, y);
            out.neighbor_gap = std::abs(out.value - next);
            out.bound = p.t * p.u / (p.u + std::exp(-static_cast<double>(p.K))) * ny * nx;
            break;
        }
        case FormStage::F_t_finiteKL: {
            Complex next = detail::f_stage_value(mc, FormStage::F_t, p, x, y);
            out.neighbor_gap = std::abs(out.value - next);
            Operator dy = fejer_map(mc, p.L, y) + (-1.0) * y;
            Operator dx = fejer_map(mc, p.K, x) + (-1.0) * x;
            out.bound = norm_star_spectral(mc, dy) * norm_star_spectral(mc, x) +
                        norm_star_spectral(mc, dx) * norm_star_spectral(mc, y);
            break;
        }
        case FormStage::F_t:
            break;
    }
    return out;
}

/// d(sigma_t(x), y)^2 against Re(F_0(x,x) + F_0(y,y) - 2 F_t(x,y)).
inline std::pair<double, double> sigma_distance_via_forms(const ModularCalculus& mc, double t,
                                                          const Operator& x, const Operator& y) {
    double lhs = metric(mc, mc.modular_flow(t, x), y);
    lhs *= lhs;
    FormStageParams p0{0.5, 0.0, 0.0, 1, 1};
    Complex fxx = detail::f_stage_value(mc, FormStage::F_t, p0, x, x);
    Complex fyy = detail::f_stage_value(mc, FormStage::F_t, p0, y, y);
    FormStageParams pt{0.5, 0.0, t, 1, 1};
    Complex fxy = detail::f_stage_value(mc, FormStage::F_t, pt, x, y);
    double rhs = (fxx + fyy - 2.0 * fxy).real();
    return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// Default sweep

struct StageReport {
    std::string name;
    std::string params;
    double gap = 0.0;        // |constructive - exact| or the Duhamel neighbor gap
    double allowance = 0.0;  // bound plus declared remainder
    bool pass = false;
};

/// Runs every stage of the chain over the default parameter sweep with the
/// supplied test pair; each row must satisfy gap <= allowance.
inline std::vector<StageReport> default_chain_sweep(const ModularCalculus& mc, const Operator& x,
                                                    const Operator& y) {
    std::vector<StageReport> rows;
    const std::vector<double> us{1e-3, 0.1, 0.5};
    const std::vector<double> ts{0.1, 0.25};
    const std::vector<int> bands{1, 2};
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return std::string(buf);
    };
    for (double u : us)
        for (int K : bands)
            for (int L : bands) {
                auto sp = psi_variational(mc, K, L, u, x, y, PsiMode::spectral);
                auto mn = psi_variational(mc, K, L, u, x, y, PsiMode::minimizer);
                auto nu = psi_variational(mc, K, L, u, x, y, PsiMode::numeric);
                double gap = std::max(std::abs(sp.value - mn.value), std::abs(sp.value - nu.value));
                rows.push_back({"psi_prime", "u=" + fmt(u) + ",K=" + fmt(K) + ",L=" + fmt(L), gap,
                                1e-9, gap <= 1e-9});
                double fgap = std::abs(psi_form(mc, K, L, u, x, y) -
                                       psi_form_spectral(mc, K, L, u, x, y));
                rows.push_back({"psi", "u=" + fmt(u) + ",K=" + fmt(K) + ",L=" + fmt(L), fgap, 1e-10,
                                fgap <= 1e-10});
            }
    for (double u : us) {
        auto pm = psi_multi(mc, 1, 2, {u, u}, x, y);
        double gap = std::abs(pm.constructive - pm.spectral);
        double allow = pm.perturbation_bound + 1e-9;
        rows.push_back({"psi_multi", "u=(" + fmt(u) + "," + fmt(u) + ")", gap, allow, gap <= allow});
    }
    for (double u : us)
        for (int K : bands) {
            ChainMapParams p;
            p.u = u;
            p.K = K;
            auto a = chain_map(mc, ChainMap::A_res, p, x);
            double gap = Operator(a.approx.mat() - a.exact.mat()).opnorm();
            rows.push_back({"A_res", "u=" + fmt(u) + ",K=" + fmt(K), gap, 1e-10, gap <= 1e-10});
            for (double t : ts) {
                p.t = t;
                auto b = chain_map(mc, ChainMap::B_pow, p, x);
                double bg = Operator(b.approx.mat() - b.exact.mat()).opnorm();
                double allow = b.remainder + 1e-6;
                rows.push_back({"B_pow", "u=" + fmt(u) + ",t=" + fmt(t) + ",K=" + fmt(K), bg, allow,
                                bg <= allow});
            }
            p.beta = c_window_floor(u, K) + 1.0;
            auto c = chain_map(mc, ChainMap::C_log, p, x);
            double cg = Operator(c.approx.mat() - c.exact.mat()).opnorm();
            rows.push_back({"C_log", "u=" + fmt(u) + ",K=" + fmt(K) + ",beta=" + fmt(p.beta), cg,
                            c.remainder + 1e-9, cg <= c.remainder + 1e-9});
            for (double t : ts) {
                ChainMapParams pe = p;
                pe.t = t;
                pe.beta = c_window_floor(u, 2 * K + 2) + 1.0;
                auto e = chain_map(mc, ChainMap::E_exp, pe, x);
                double eg = Operator(e.approx.mat() - e.exact.mat()).opnorm();
                double allow = e.remainder + 1e-8;
                rows.push_back({"E_exp", "u=" + fmt(u) + ",t=" + fmt(t) + ",K=" + fmt(K), eg, allow,
                                eg <= allow});
            }
        }
    for (double u : us)
        for (double t : ts)
            for (int K : bands)
                for (int L : bands) {
                    FormStageParams p{u, c_window_floor(u, 2 * K + 2) + 1.0, t, K, L};
                    for (FormStage st : {FormStage::F_ubt, FormStage::F_ut, FormStage::F_t_finiteKL}) {
                        auto r = f_forms(mc, st, p, x, y);
                        const char* nm = st == FormStage::F_ubt ? "F_ubt"
                                         : st == FormStage::F_ut ? "F_ut"
                                                                 : "F_t_finiteKL";
                        rows.push_back({nm,
                                        "u=" + fmt(u) + ",t=" + fmt(t) + ",K=" + fmt(K) +
                                            ",L=" + fmt(L),
                                        r.neighbor_gap, r.bound + 1e-12,
                                        r.neighbor_gap <= r.bound + 1e-12});
                    }
                }
    for (double t : ts) {
        auto [lhs, rhs] = sigma_distance_via_forms(mc, t, x, y);
        double gap = std::abs(lhs - rhs);
        rows.push_back({"sigma_distance", "t=" + fmt(t), gap, 1e-10, gap <= 1e-10});
    }
    return rows;
}

} // namespace wstar
