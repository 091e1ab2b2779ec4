#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wstar/clogic.hpp"

namespace wstar {

using nlohmann::json;

inline ModelRecipe parse_recipe(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw BadInput("recipe needs a \"kind\" string");
    std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "tracial") return ModelRecipe::tracial(j.at("n").get<int>());
        if (kind == "diagonal") return ModelRecipe::diagonal(j.at("p").get<std::vector<double>>());
        if (kind == "geometric_truncation")
            return ModelRecipe::geometric_truncation(j.at("n0_dim").get<int>(),
                                                     j.at("levels").get<int>());
        if (kind == "periodic")
            return ModelRecipe::periodic(j.at("lambda").get<double>(), j.at("levels").get<int>());
        if (kind == "tensor")
            return ModelRecipe::tensor(parse_recipe(j.at("left")), parse_recipe(j.at("right")));
    } catch (const json::exception& e) {
        throw BadInput(std::string("bad recipe parameters: ") + e.what());
    }
    throw BadInput("unknown recipe kind \"" + kind + "\"");
}

inline json recipe_to_json(const ModelRecipe& r) {
    switch (r.kind) {
        case ModelRecipe::Kind::tracial: return {{"kind", "tracial"}, {"n", r.n}};
        case ModelRecipe::Kind::diagonal: return {{"kind", "diagonal"}, {"p", r.p}};
        case ModelRecipe::Kind::geometric_truncation:
            return {{"kind", "geometric_truncation"}, {"n0_dim", r.n0_dim}, {"levels", r.levels}};
        case ModelRecipe::Kind::periodic:
            return {{"kind", "periodic"}, {"lambda", r.lambda}, {"levels", r.levels}};
        case ModelRecipe::Kind::tensor:
            return {{"kind", "tensor"}, {"left", recipe_to_json(*r.left)},
                    {"right", recipe_to_json(*r.right)}};
    }
    throw BadInput("unknown recipe kind");
}

inline Matrix parse_matrix(const json& j, Eigen::Index expected_dim = -1) {
    if (!j.is_array() || j.empty()) throw BadInput("matrix must be a non-empty array of rows");
    const Eigen::Index n = static_cast<Eigen::Index>(j.size());
    if (expected_dim >= 0 && n != expected_dim)
        throw BadInput("matrix row count does not match dim");
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw BadInput("matrix rows must all have length dim");
        for (Eigen::Index k = 0; k < n; ++k) {
            const json& e = row[static_cast<std::size_t>(k)];
            if (!e.is_object() || !e.contains("re") || !e.contains("im"))
                throw BadInput("matrix entries need {\"re\":..,\"im\":..}");
            m(i, k) = Complex(e["re"].get<double>(), e["im"].get<double>());
        }
    }
    return m;
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            row.push_back({{"re", m(i, k).real()}, {"im", m(i, k).imag()}});
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Accepts {"dim":n,"rho":{"eigenvalues":[..]}}, {"dim":n,"rho":{"matrix":..}}
/// or {"recipe":{...}}; validation failures surface as BadInput.
inline BuiltModel parse_model(const json& j) {
    if (!j.is_object()) throw BadInput("model spec must be a JSON object");
    if (j.contains("recipe")) return build_recipe(parse_recipe(j["recipe"]));
    if (!j.contains("dim") || !j.contains("rho")) throw BadInput("model spec needs dim and rho");
    Eigen::Index dim = 0;
    try {
        dim = j["dim"].get<Eigen::Index>();
    } catch (const json::exception&) {
        throw BadInput("dim must be an integer");
    }
    const json& rho = j["rho"];
    try {
        if (rho.contains("eigenvalues")) {
            auto p = rho["eigenvalues"].get<std::vector<double>>();
            if (static_cast<Eigen::Index>(p.size()) != dim)
                throw BadInput("eigenvalue count does not match dim");
            return {WStarModel::from_eigenvalues(p), {}, 1.0};
        }
        if (rho.contains("matrix"))
            return {WStarModel::from_matrix(parse_matrix(rho["matrix"], dim)), {}, 1.0};
    } catch (const json::exception& e) {
        throw BadInput(std::string("bad rho payload: ") + e.what());
    } catch (const Error& e) {
        throw BadInput(std::string("invalid density matrix: ") + e.what());
    }
    throw BadInput("rho needs either eigenvalues or matrix");
}

inline json model_to_json(const WStarModel& m) {
    std::vector<double> p(m.eigenvalues().data(), m.eigenvalues().data() + m.dim());
    return {{"dim", m.dim()}, {"rho", {{"eigenvalues", p}}}};
}

inline BuiltModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadInput("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw BadInput(std::string("malformed JSON: ") + e.what());
    }
    return parse_model(j);
}

inline Operator parse_operator(const json& j, Eigen::Index dim) {
    if (j.is_object() && j.contains("matrix")) return Operator(parse_matrix(j["matrix"], dim));
    return Operator(parse_matrix(j, dim));
}

/// Report contract: {"v":1,"reports":[{axiom,value,tolerance,pass,witness,wall_time_ms},..]}.
inline json reports_to_json(const std::vector<AxiomReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) {
        json row{{"axiom", r.axiom},
                 {"value", r.value},
                 {"tolerance", r.tolerance},
                 {"pass", r.pass},
                 {"wall_time_ms", r.wall_time_ms}};
        row["witness"] = r.witness.empty() ? json(nullptr) : json(r.witness);
        arr.push_back(std::move(row));
    }
    return {{"v", 1}, {"reports", std::move(arr)}};
}

inline json error_to_json(const std::string& type, const std::string& message) {
    return {{"v", 1}, {"error", {{"type", type}, {"message", message}}}};
}

} // namespace wstar
