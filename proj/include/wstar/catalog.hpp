#pragma once

#include <map>
#include <memory>
#include <string>

#include "wstar/model.hpp"

namespace wstar {

/// Recipes for the named model families used as suite fixtures.
struct ModelRecipe {
    enum class Kind { tracial, diagonal, geometric_truncation, periodic, tensor };

    Kind kind = Kind::tracial;
    int n = 2;                         // tracial dimension
    std::vector<double> p;             // diagonal eigenvalues
    int n0_dim = 1;                    // geometric_truncation first factor
    int levels = 2;                    // geometric_truncation / periodic levels
    double lambda = 0.5;               // periodic ratio
    std::shared_ptr<ModelRecipe> left, right;  // tensor factors

    static ModelRecipe tracial(int n) {
        ModelRecipe r;
        r.kind = Kind::tracial;
        r.n = n;
        return r;
    }
    static ModelRecipe diagonal(std::vector<double> p) {
        ModelRecipe r;
        r.kind = Kind::diagonal;
        r.p = std::move(p);
        return r;
    }
    static ModelRecipe geometric_truncation(int n0_dim, int levels) {
        ModelRecipe r;
        r.kind = Kind::geometric_truncation;
        r.n0_dim = n0_dim;
        r.levels = levels;
        return r;
    }
    static ModelRecipe periodic(double lambda, int levels) {
        ModelRecipe r;
        r.kind = Kind::periodic;
        r.lambda = lambda;
        r.levels = levels;
        return r;
    }
    static ModelRecipe tensor(ModelRecipe a, ModelRecipe b) {
        ModelRecipe r;
        r.kind = Kind::tensor;
        r.left = std::make_shared<ModelRecipe>(std::move(a));
        r.right = std::make_shared<ModelRecipe>(std::move(b));
        return r;
    }
};

/// A built fixture: the model, named operator constants (the matrix units
/// w_{jk} where applicable), and the truncation renormalization constant.
struct BuiltModel {
    WStarModel model;
    std::map<std::string, Operator> constants;
    double renorm_c = 1.0;
};

namespace detail {

inline std::vector<double> recipe_eigenvalues(const ModelRecipe& r) {
    switch (r.kind) {
        case ModelRecipe::Kind::tracial: {
            if (r.n < 1) throw BadParameters("tracial recipe needs n >= 1");
            return std::vector<double>(static_cast<std::size_t>(r.n), 1.0 / r.n);
        }
        case ModelRecipe::Kind::diagonal: {
            if (r.p.empty()) throw BadParameters("diagonal recipe needs eigenvalues");
            return r.p;
        }
        case ModelRecipe::Kind::geometric_truncation: {
            if (r.n0_dim < 1 || r.levels < 2)
                throw BadParameters("geometric_truncation needs n0_dim >= 1, levels >= 2");
            double c = 1.0 / (1.0 - std::pow(2.0, -r.levels));
            std::vector<double> out;
            for (int j = 0; j < r.levels; ++j)
                for (int i = 0; i < r.n0_dim; ++i)
                    out.push_back(c * std::pow(2.0, -j - 1) / r.n0_dim);
            return out;
        }
        case ModelRecipe::Kind::periodic: {
            if (!(r.lambda > 0.0 && r.lambda < 1.0) || r.levels < 2)
                throw BadParameters("periodic recipe needs lambda in (0,1), levels >= 2");
            std::vector<double> out;
            double norm = (1.0 - r.lambda) / (1.0 - std::pow(r.lambda, r.levels));
            for (int j = 0; j < r.levels; ++j) out.push_back(norm * std::pow(r.lambda, j));
            return out;
        }
        case ModelRecipe::Kind::tensor: {
            if (!r.left || !r.right) throw BadParameters("tensor recipe needs two factors");
            auto a = recipe_eigenvalues(*r.left), b = recipe_eigenvalues(*r.right);
            std::vector<double> out;
            for (double va : a)
                for (double vb : b) out.push_back(va * vb);
            std::sort(out.begin(), out.end(), std::greater<double>());
            return out;
        }
    }
    throw BadParameters("unknown recipe kind");
}

} // namespace detail

/// Builds the model and, for geometric truncations, the matrix-unit constants
/// w_{jk} (acting on the level index, identity on the tracial factor) keyed
/// "w_{j}_{k}".  The eigenvalue layout is level-major so the list is sorted.
inline BuiltModel build_recipe(const ModelRecipe& r) {
    std::vector<double> p = detail::recipe_eigenvalues(r);
    // fix tiny normalization drift so the trace check passes exactly
    double tr = 0.0;
    for (double v : p) tr += v;
    for (double& v : p) v /= tr;
    BuiltModel out{WStarModel::from_eigenvalues(p), {}, 1.0};
    if (r.kind == ModelRecipe::Kind::geometric_truncation) {
        out.renorm_c = 1.0 / (1.0 - std::pow(2.0, -r.levels));
        const Eigen::Index d = out.model.dim();
        for (int j = 0; j < r.levels; ++j)
            for (int k = 0; k < r.levels; ++k) {
                Matrix w = Matrix::Zero(d, d);
                for (int i = 0; i < r.n0_dim; ++i)
                    w(static_cast<Eigen::Index>(j) * r.n0_dim + i,
                      static_cast<Eigen::Index>(k) * r.n0_dim + i) = Complex(1.0, 0.0);
                out.constants.emplace("w_" + std::to_string(j) + "_" + std::to_string(k),
                                      Operator(std::move(w)));
            }
    }
    return out;
}

/// Fixtures that are supposed to fail their axiom, with the reason recorded.
struct NegativeFixture {
    ModelRecipe recipe;
    std::string axiom_id;
    std::string reason;
};

inline std::vector<NegativeFixture> negative_fixtures() {
    return {
        {ModelRecipe::tracial(2), "23",
         "finite-dimensional centralizers are type I, no II_1 witness exists"},
        {ModelRecipe::periodic(0.5, 4), "21",
         "spectrum lies in (ln 2) Z, so the (ln 3) Z lattice instances see mass"},
        {ModelRecipe::geometric_truncation(2, 2), "27",
         "the w_00 corner is a full 2x2 block, not scalar"},
    };
}

} // namespace wstar
