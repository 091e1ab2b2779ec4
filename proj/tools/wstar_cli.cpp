#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wstar/definability.hpp"
#include "wstar/json_io.hpp"

using namespace wstar;

namespace {

struct RunConfig {
    std::string model_path;
    std::string axioms;  // id-range string like "1-20" or "1,3,21"
    double tol = 1e-6;
    std::uint64_t seed = 42;
    int samples = 32;
    std::string out_path;
    std::string format = "json";
    double gamma = 0.0;
    int threads = 1;
};

void apply_seed_env(RunConfig& cfg) {
    if (const char* env = std::getenv("WSTAR_SEED")) {
        try {
            cfg.seed = std::stoull(env);
        } catch (...) {
            throw BadInput("WSTAR_SEED must be an integer");
        }
    }
}

std::vector<int> parse_axiom_range(const std::string& spec) {
    std::vector<int> ids;
    if (spec.empty()) return ids;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        std::size_t comma = spec.find(',', pos);
        std::string piece = spec.substr(pos, comma == std::string::npos ? comma : comma - pos);
        std::size_t dash = piece.find('-');
        try {
            if (dash == std::string::npos) {
                ids.push_back(std::stoi(piece));
            } else {
                int lo = std::stoi(piece.substr(0, dash));
                int hi = std::stoi(piece.substr(dash + 1));
                if (hi < lo) throw BadInput("axiom range is reversed: " + piece);
                for (int i = lo; i <= hi; ++i) ids.push_back(i);
            }
        } catch (const Error&) {
            throw;
        } catch (...) {
            throw BadInput("cannot parse axiom range piece: " + piece);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return ids;
}

double parse_gamma(const std::string& s) {
    if (s.empty()) return 0.0;
    try {
        if (s.rfind("ln", 0) == 0) return std::log(std::stod(s.substr(2)));
        return std::stod(s);
    } catch (const std::exception&) {
        throw BadInput("cannot parse gamma value: " + s);
    }
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(cfg.out_path);
        if (!out) throw BadInput("cannot write output file: " + cfg.out_path);
        out << text << "\n";
    }
}

std::string reports_text_table(const std::vector<AxiomReport>& reports) {
    char line[160];
    std::string out;
    std::snprintf(line, sizeof(line), "%-28s %14s %10s %-6s %8s", "axiom", "value", "tol", "pass",
                  "ms");
    out += line;
    for (const auto& r : reports) {
        std::snprintf(line, sizeof(line), "\n%-28s %14.6e %10.1e %-6s %8ld", r.axiom.c_str(),
                      r.value, r.tolerance, r.pass ? "pass" : "FAIL", r.wall_time_ms);
        out += line;
    }
    return out;
}

AxiomInstantiation instantiation_for(const RunConfig& cfg, const BuiltModel& built) {
    AxiomInstantiation inst;
    inst.gamma = cfg.gamma;
    inst.tol_exact = std::min(inst.tol_exact, cfg.tol);
    if (!built.constants.empty()) {
        inst.has_matrix_units = true;
        int levels = 0;
        while (built.constants.count("w_" + std::to_string(levels) + "_0")) ++levels;
        inst.levels = levels;
        inst.renorm_c = built.renorm_c;
        // the corner is scalar exactly when w_00 is rank one
        double corner_tr = built.constants.at("w_0_0").mat().trace().real();
        inst.corner_scalar = corner_tr < 1.5;
    }
    return inst;
}

int cmd_check_axioms(const RunConfig& cfg) {
    BuiltModel built = load_model_file(cfg.model_path);
    BallSearch search;
    search.seed = cfg.seed;
    search.count = std::max(4, cfg.samples);
    auto which = parse_axiom_range(cfg.axioms);
    auto reports = run_suite(built.model, which, search, instantiation_for(cfg, built),
                             built.constants.empty() ? nullptr : &built.constants);
    if (cfg.format == "text")
        emit(cfg, reports_text_table(reports));
    else
        emit(cfg, reports_to_json(reports).dump(2));
    for (const auto& r : reports)
        if (!r.pass && !r.expected_fail) return 1;
    return 0;
}

int cmd_verify_lemmas(const RunConfig& cfg, const std::string& lemma, double alpha, double beta) {
    BuiltModel built = load_model_file(cfg.model_path);
    ModularCalculus mc(built.model);
    const Eigen::Index d = built.model.dim();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_op = [&]() {
        Matrix m(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
        Operator x(std::move(m));
        return (1.0 / std::max(1.0, x.opnorm())) * x;
    };

    double worst = 0.0;
    bool violated = false;
    json detail = json::object();
    if (lemma == "normg") {
        for (int i = 0; i < cfg.samples; ++i) {
            Operator x = random_op();
            auto [lhs, rhs] = normg_identity_check(mc, x);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        violated = worst > 1e-10;
    } else if (lemma == "contprod") {
        for (double a : {0.5, 1.0, 2.0})
            for (int i = 0; i < cfg.samples; ++i) {
                Operator x = mc.spectral_truncate(a, random_op()), y = random_op();
                double lhs = norm_star_spectral(mc, x * y);
                double rhs = (2.0 * std::exp(a) + std::exp(a / 2.0)) * x.opnorm() *
                             norm_star_spectral(mc, y);
                worst = std::max(worst, lhs - rhs);
            }
        violated = worst > 0.0;
    } else if (lemma == "contmod") {
        for (double t : {0.01, 0.1, 1.0})
            for (int i = 0; i < cfg.samples; ++i) {
                Operator x = random_op();
                double lhs = norm_star_spectral(mc, mc.modular_flow(t, x) - x);
                worst = std::max(worst, lhs - 2.0 * t * norm_sharp(mc, x));
            }
        violated = worst > 0.0;
    } else if (lemma == "spectral") {
        for (int n = 2; n <= 5; ++n)
            for (int i = 0; i < std::max(1, cfg.samples / 4); ++i) {
                Operator x = random_op();
                double m = x.opnorm();
                worst = std::max(worst, axiom16_check(mc, 1.0, n, x, m));
                worst = std::max(worst, axiom18_check(mc, 1.0, 0.5, n, x, m));
            }
        violated = worst > 0.0;
    } else if (lemma == "forms") {
        if (alpha + beta >= 1.0) throw BadExponents("forms lemma needs alpha + beta < 1");
        for (int n = 2; n <= 5; ++n)
            for (int i = 0; i < std::max(1, cfg.samples / 4); ++i) {
                Operator x = random_op(), y = random_op();
                double m = std::max(x.opnorm(), y.opnorm());
                worst = std::max(worst, form_recursion(mc, alpha, beta, n, 1, 2, x, y, m).margin);
                if (alpha < 0.5)
                    worst = std::max(worst, form_top_level(mc, alpha, n, 2, 1, x, y, m).margin);
            }
        violated = worst > 0.0;
    } else {
        throw BadInput("unknown lemma: " + lemma);
    }
    detail["v"] = 1;
    detail["lemma"] = lemma;
    detail["samples"] = cfg.samples;
    detail["worst_margin"] = worst;
    detail["pass"] = !violated;
    if (cfg.format == "text") {
        char line[128];
        std::snprintf(line, sizeof(line), "%-10s %14s %-6s\n%-10s %14.6e %-6s", "lemma",
                      "worst_margin", "pass", lemma.c_str(), worst, violated ? "FAIL" : "pass");
        emit(cfg, line);
    } else {
        emit(cfg, detail.dump(2));
    }
    return violated ? 1 : 0;
}

int cmd_spectrum(const RunConfig& cfg, const std::string& op_path, const std::string& op_name) {
    BuiltModel built = load_model_file(cfg.model_path);
    ModularCalculus mc(built.model);
    const Eigen::Index d = built.model.dim();
    Operator x(Matrix::Ones(d, d));
    if (!op_name.empty()) {
        auto it = built.constants.find(op_name);
        if (it == built.constants.end()) throw BadInput("no model constant named " + op_name);
        x = it->second;
    } else if (!op_path.empty()) {
        std::ifstream in(op_path);
        if (!in) throw BadInput("cannot open operator file: " + op_path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw BadInput(std::string("malformed JSON: ") + e.what());
        }
        x = parse_operator(j, d);
    }
    auto flow = mc.arveson_spectrum(Operator(Matrix::Ones(d, d)));
    auto spec = mc.arveson_spectrum(x);
    if (cfg.format == "text") {
        std::string out = "flow spectrum:";
        char buf[32];
        for (double v : flow) {
            std::snprintf(buf, sizeof(buf), " % .9f", v);
            out += buf;
        }
        out += "\noperator spectrum:";
        for (double v : spec) {
            std::snprintf(buf, sizeof(buf), " % .9f", v);
            out += buf;
        }
        emit(cfg, out);
    } else {
        emit(cfg, json{{"v", 1}, {"flow_spectrum", flow}, {"operator_spectrum", spec}}.dump(2));
    }
    return 0;
}

int cmd_definability(const RunConfig& cfg) {
    BuiltModel built = load_model_file(cfg.model_path);
    ModularCalculus mc(built.model);
    const Eigen::Index d = built.model.dim();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_op = [&]() {
        Matrix m(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
        Operator x(std::move(m));
        return (1.0 / std::max(1.0, x.opnorm())) * x;
    };
    Operator x = random_op(), y = random_op();
    auto rows = default_chain_sweep(mc, x, y);
    bool all_pass = true;
    if (cfg.format == "text") {
        std::string out;
        char line[192];
        std::snprintf(line, sizeof(line), "%-14s %-28s %14s %14s %-6s", "stage", "params", "gap",
                      "allowance", "pass");
        out += line;
        for (const auto& r : rows) {
            std::snprintf(line, sizeof(line), "\n%-14s %-28s %14.6e %14.6e %-6s", r.name.c_str(),
                          r.params.c_str(), r.gap, r.allowance, r.pass ? "pass" : "FAIL");
            out += line;
            all_pass = all_pass && r.pass;
        }
        emit(cfg, out);
    } else {
        json arr = json::array();
        for (const auto& r : rows) {
            arr.push_back({{"stage", r.name},
                           {"params", r.params},
                           {"gap", r.gap},
                           {"bound", r.allowance},
                           {"pass", r.pass}});
            all_pass = all_pass && r.pass;
        }
        emit(cfg, json{{"v", 1}, {"stages", std::move(arr)}}.dump(2));
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-dimensional W*-probability verification workbench"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string gamma_str, lemma, op_path, op_name;
    double alpha = 0.25, beta = 1.0 / 3.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--model", cfg.model_path, "model spec JSON file")->required();
        sub->add_option("--tol", cfg.tol, "exact-identity tolerance");
        sub->add_option("--seed", cfg.seed, "search seed");
        sub->add_option("--samples", cfg.samples, "sample count per check");
        sub->add_option("--out", cfg.out_path, "output file (default stdout)");
        sub->add_option("--format", cfg.format, "json or text")
            ->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--threads", cfg.threads, "worker threads (reserved)");
    };

    CLI::App* check = app.add_subcommand("check-axioms", "run the axiom suite");
    add_common(check);
    check->add_option("--axioms", cfg.axioms, "axiom id range, e.g. 1-20 or 21,23");
    check->add_option("--gamma", gamma_str, "lattice generator for (21)-(23), e.g. ln2 or 0.693");

    CLI::App* verify = app.add_subcommand("verify-lemmas", "certify a lemma battery");
    add_common(verify);
    verify->add_option("--lemma", lemma, "contprod|normg|contmod|spectral|forms")->required();
    verify->add_option("--alpha", alpha, "forms exponent alpha");
    verify->add_option("--beta", beta, "forms exponent beta");

    CLI::App* spectrum = app.add_subcommand("spectrum", "print modular spectra");
    add_common(spectrum);
    spectrum->add_option("--op", op_path, "operator fixture JSON file");
    spectrum->add_option("--op-name", op_name, "named model constant, e.g. w_0_1");

    CLI::App* definability = app.add_subcommand("definability", "run the chain-stage sweep");
    add_common(definability);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        apply_seed_env(cfg);
        cfg.gamma = parse_gamma(gamma_str);
        if (check->parsed()) return cmd_check_axioms(cfg);
        if (verify->parsed()) return cmd_verify_lemmas(cfg, lemma, alpha, beta);
        if (spectrum->parsed()) return cmd_spectrum(cfg, op_path, op_name);
        if (definability->parsed()) return cmd_definability(cfg);
    } catch (const Error& e) {
        std::cerr << error_to_json(e.code(), e.what()).dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << error_to_json("InternalError", e.what()).dump() << "\n";
        return 2;
    }
    return 2;
}
