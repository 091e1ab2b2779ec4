#pragma once

#include <random>

#include "wstar/model.hpp"

namespace wstar::testing {

inline Operator random_operator(Eigen::Index n, std::mt19937_64& rng, double target_norm = 0.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    Operator op(m);
    if (target_norm > 0.0 && op.opnorm() > 0.0) op = (target_norm / op.opnorm()) * op;
    return op;
}

inline std::vector<double> random_state_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.2, 1.0);
    std::vector<double> p(static_cast<std::size_t>(n));
    double s = 0.0;
    for (auto& v : p) {
        v = uni(rng);
        s += v;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        p[i] /= s;
        acc += p[i];
    }
    p.back() = 1.0 - acc;
    return p;
}

/// The running example model with eigenvalues (2/3, 1/3).
inline WStarModel model_23() { return WStarModel::from_eigenvalues({2.0 / 3.0, 1.0 / 3.0}); }

inline WStarModel tracial(Eigen::Index n) {
    return WStarModel::from_eigenvalues(std::vector<double>(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n)));
}

} // namespace wstar::testing
