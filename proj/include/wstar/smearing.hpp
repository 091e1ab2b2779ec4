#pragma once

#include <cmath>
#include <vector>

#include "wstar/modular.hpp"

namespace wstar {

/// Fourier transform of the (translated) Fejer kernel f_{m,l}: a hat of
/// height 1 centered at l with half-width m.  The kink |t-l| = m evaluates
/// to 0 (closed support convention).
inline double fejer_hat(double m, double l, double t) {
    return std::max(0.0, 1.0 - std::abs(t - l) / m);
}

/// Fourier transform of the De la Vallee Poussin kernel h_K:
/// 1 on [-K,K], linear down to 0 on [K, K+1].
inline double dlvp_hat(double K, double t) {
    return std::max(0.0, std::min(K + 1.0 - std::abs(t), 1.0));
}

/// F_{m,l} = sigma_{f_{m,l}}, exact via the multiplier representation.
inline Operator fejer_map(const ModularCalculus& mc, double m, double l, const Operator& x) {
    if (!(m > 0.0)) throw NonPositiveBandwidth("fejer bandwidth must be > 0");
    return mc.apply_multiplier([m, l](double r) { return Complex(fejer_hat(m, l, r), 0.0); }, x);
}

inline Operator fejer_map(const ModularCalculus& mc, double m, const Operator& x) {
    return fejer_map(mc, m, 0.0, x);
}

/// H_K = (K+1) F_{K+1} - K F_K; identity on spectrum inside [-K, K].
inline Operator dlvp_map(const ModularCalculus& mc, int K, const Operator& x) {
    if (K < 0) throw BadRange("dlvp_map needs K >= 0");
    return mc.apply_multiplier(
        [K](double r) { return Complex(dlvp_hat(static_cast<double>(K), r), 0.0); }, x);
}

/// Smeared product m_{K,L}(x,y) = F_K(x) F_L(y).
inline Operator smeared_product(const ModularCalculus& mc, double K, double L, const Operator& x,
                                const Operator& y) {
    return fejer_map(mc, K, x) * fejer_map(mc, L, y);
}

/// M_{(K,L)}(a,b): the four-term combination equal to H_{K+1}(a) H_{L+1}(b).
inline Operator big_smeared_product(const ModularCalculus& mc, int K, int L, const Operator& a,
                                    const Operator& b) {
    double k = K, l = L;
    Operator r = (k + 1) * (l + 1) * smeared_product(mc, k + 1, l + 1, a, b) +
                 (k + 2) * (l + 2) * smeared_product(mc, k + 2, l + 2, a, b) -
                 (k + 1) * (l + 2) * smeared_product(mc, k + 1, l + 2, a, b) -
                 (k + 2) * (l + 1) * smeared_product(mc, k + 2, l + 1, a, b);
    return r;
}

/// One monomial of a *-polynomial in one variable: coeff * x^{e_1}...x^{e_k}
/// where e_i is either the variable itself or its adjoint.
struct StarMonomial {
    Complex coeff;
    std::vector<bool> stars;  // stars[i] true means the i-th factor is x*
};

using StarPolynomial = std::vector<StarMonomial>;

namespace detail {

inline Operator monomial_factor(const Operator& x, bool star) {
    return star ? x.adjoint() : x;
}

/// Nested-M expansion of one monomial word for a fixed index tuple.
inline Operator nested_word(const ModularCalculus& mc, const std::vector<bool>& stars,
                            const std::vector<int>& bands, const std::vector<int>& tuple,
                            const Operator& x) {
    const std::size_t k = stars.size();
    if (k == 1) return fejer_map(mc, bands[static_cast<std::size_t>(tuple[0])], monomial_factor(x, stars[0]));
    Operator acc = smeared_product(mc, bands[static_cast<std::size_t>(tuple[k - 2])],
                                   bands[static_cast<std::size_t>(tuple[k - 1])],
                                   monomial_factor(x, stars[k - 2]), monomial_factor(x, stars[k - 1]));
    int acc_band = bands[static_cast<std::size_t>(tuple[k - 2])] + bands[static_cast<std::size_t>(tuple[k - 1])];
    for (std::size_t j = k - 2; j-- > 0;) {
        int nj = bands[static_cast<std::size_t>(tuple[j])];
        acc = big_smeared_product(mc, nj, acc_band, fejer_map(mc, nj, monomial_factor(x, stars[j])), acc);
        acc_band += nj;
    }
    return acc;
}

} // namespace detail

/// tau_{p,lambda,N}(x): the nested-M expansion of p(sum_i lambda_i F_{N_i}(x)).
inline Operator smeared_polynomial(const ModularCalculus& mc, const StarPolynomial& p,
                                   const std::vector<double>& lambda, const std::vector<int>& bands,
                                   const Operator& x) {
    if (lambda.size() != bands.size()) throw LengthMismatch("weights and bandwidths differ in length");
    double sum = 0.0;
    for (double w : lambda) {
        if (w < -1e-12 || w > 1.0 + 1e-12) throw BadWeights("weights must lie in [0,1]");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw BadWeights("weights must sum to 1");

    const std::size_t nw = lambda.size();
    Operator out = mc.model().zero();
    for (const StarMonomial& mono : p) {
        if (mono.stars.empty()) {
            out = out + mono.coeff * mc.model().identity();
            continue;
        }
        const std::size_t k = mono.stars.size();
        // sum over all index tuples in {0..nw-1}^k
        std::vector<int> tuple(k, 0);
        while (true) {
            Complex w = mono.coeff;
            for (std::size_t j = 0; j < k; ++j) w *= lambda[static_cast<std::size_t>(tuple[j])];
            if (std::abs(w) > 0.0)
                out = out + w * detail::nested_word(mc, mono.stars, bands, tuple, x);
            std::size_t pos = 0;
            while (pos < k && ++tuple[pos] == static_cast<int>(nw)) {
                tuple[pos] = 0;
                ++pos;
            }
            if (pos == k) break;
        }
    }
    return out;
}

/// Direct evaluation oracle for the same polynomial with true products.
inline Operator polynomial_direct(const ModularCalculus& mc, const StarPolynomial& p,
                                  const std::vector<double>& lambda, const std::vector<int>& bands,
                                  const Operator& x) {
    Operator base = mc.model().zero();
    for (std::size_t i = 0; i < lambda.size(); ++i)
        base = base + lambda[i] * fejer_map(mc, bands[i], x);
    Operator out = mc.model().zero();
    for (const StarMonomial& mono : p) {
        Operator acc = mc.model().identity();
        for (bool star : mono.stars) acc = acc * detail::monomial_factor(base, star);
        out = out + mono.coeff * acc;
    }
    return out;
}

/// Membership test for M(sigma, [-K,K]) via translated Fejer maps, following
/// the covering-by-translates characterization.  For K = 0 half-integer
/// translates with bandwidth 1/2 are used so the translates still cover
/// (0, L_max] while vanishing at 0.
inline bool spectral_membership_test(const ModularCalculus& mc, int K, const Operator& x, int L_max) {
    if (K < 0 || L_max < 2 * K) throw BadRange("need L_max >= 2K >= 0");
    if (x.opnorm() == 0.0) return true;
    const double cutoff = 1e-10 * x.opnorm();
    std::vector<double> translates;
    double band;
    if (K >= 1) {
        band = K;
        for (int L = 2 * K; L <= L_max; ++L) translates.push_back(static_cast<double>(L));
    } else {
        band = 0.5;
        for (double L = 0.5; L <= static_cast<double>(L_max) + 1e-9; L += 0.5) translates.push_back(L);
    }
    for (double L : translates) {
        if (fejer_map(mc, band, L, x).opnorm() > cutoff) return false;
        if (fejer_map(mc, band, -L, x).opnorm() > cutoff) return false;
    }
    return true;
}

} // namespace wstar
