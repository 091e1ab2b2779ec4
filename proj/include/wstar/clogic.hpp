#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "wstar/catalog.hpp"
#include "wstar/discretization.hpp"

namespace wstar {

// ---------------------------------------------------------------------------
// Terms

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// A term of the language: variables, the constants 0/1/w_{jk}, and the
/// function symbols (scalars, +, *, sigma_t, G_s, F_{m,l}, m_{K,L}, M_{(K,L)},
/// H_K, tau_{p,lambda,N}).
struct Term {
    enum class Kind {
        var,
        zero,
        one,
        named,
        scale,
        add,
        star,
        sigma,
        gmap,
        fejer,
        smear_prod,
        big_smear_prod,
        dlvp,
        tau_poly
    };

    Kind kind;
    int var = -1;
    std::string name;
    Complex lambda{0.0, 0.0};
    double t = 0.0;       // sigma / gmap parameter
    double m = 0.0;       // fejer bandwidth
    double l = 0.0;       // fejer translate
    int K = 0, L = 0;     // smeared product / dlvp bands
    StarPolynomial poly;
    std::vector<double> weights;
    std::vector<int> bands;
    std::vector<TermPtr> args;
};

inline TermPtr t_var(int i) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::var;
    t->var = i;
    return t;
}
inline TermPtr t_zero() {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::zero;
    return t;
}
inline TermPtr t_one() {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::one;
    return t;
}
inline TermPtr t_const(std::string name) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::named;
    t->name = std::move(name);
    return t;
}
inline TermPtr t_scale(Complex lambda, TermPtr a) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::scale;
    t->lambda = lambda;
    t->args = {std::move(a)};
    return t;
}
inline TermPtr t_add(TermPtr a, TermPtr b) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::add;
    t->args = {std::move(a), std::move(b)};
    return t;
}
inline TermPtr t_star(TermPtr a) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::star;
    t->args = {std::move(a)};
    return t;
}
inline TermPtr t_sigma(double time, TermPtr a) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::sigma;
    t->t = time;
    t->args = {std::move(a)};
    return t;
}
inline TermPtr t_gmap(double s, TermPtr a) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::gmap;
    t->t = s;
    t->args = {std::move(a)};
    return t;
}
inline TermPtr t_fejer(double m, double l, TermPtr a) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::fejer;
    t->m = m;
    t->l = l;
    t->args = {std::move(a)};
    return t;
}
inline TermPtr t_smear(int K, int L, TermPtr a, TermPtr b) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::smear_prod;
    t->K = K;
    t->L = L;
    t->args = {std::move(a), std::move(b)};
    return t;
}
inline TermPtr t_bigsmear(int K, int L, TermPtr a, TermPtr b) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::big_smear_prod;
    t->K = K;
    t->L = L;
    t->args = {std::move(a), std::move(b)};
    return t;
}
inline TermPtr t_dlvp(int K, TermPtr a) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::dlvp;
    t->K = K;
    t->args = {std::move(a)};
    return t;
}
inline TermPtr t_tau(StarPolynomial p, std::vector<double> weights, std::vector<int> bands,
                     TermPtr a) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::tau_poly;
    t->poly = std::move(p);
    t->weights = std::move(weights);
    t->bands = std::move(bands);
    t->args = {std::move(a)};
    return t;
}

/// Evaluation environment: a model with its modular calculus, the named
/// operator constants, and the current variable assignment.
struct EvalContext {
    const ModularCalculus* mc;
    const std::map<std::string, Operator>* constants = nullptr;
    std::vector<std::optional<Operator>> vars;
    std::vector<double> radii;
};

inline Operator eval_term(EvalContext& ctx, const TermPtr& term) {
    const ModularCalculus& mc = *ctx.mc;
    switch (term->kind) {
        case Term::Kind::var: {
            std::size_t i = static_cast<std::size_t>(term->var);
            if (i >= ctx.vars.size() || !ctx.vars[i])
                throw UnboundVariable("variable " + std::to_string(term->var) + " unassigned");
            const Operator& v = *ctx.vars[i];
            if (i < ctx.radii.size() && v.opnorm() > ctx.radii[i] + 1e-9)
                throw DomainViolation("variable " + std::to_string(term->var) +
                                      " exceeds its domain radius");
            return v;
        }
        case Term::Kind::zero:
            return mc.model().zero();
        case Term::Kind::one:
            return mc.model().identity();
        case Term::Kind::named: {
            if (!ctx.constants || !ctx.constants->count(term->name))
                throw UnboundVariable("constant " + term->name + " not provided by the model");
            return ctx.constants->at(term->name);
        }
        case Term::Kind::scale:
            return term->lambda * eval_term(ctx, term->args[0]);
        case Term::Kind::add:
            return eval_term(ctx, term->args[0]) + eval_term(ctx, term->args[1]);
        case Term::Kind::star:
            return eval_term(ctx, term->args[0]).adjoint();
        case Term::Kind::sigma:
            return mc.modular_flow(term->t, eval_term(ctx, term->args[0]));
        case Term::Kind::gmap:
            return mc.g_map(term->t, eval_term(ctx, term->args[0]));
        case Term::Kind::fejer:
            return fejer_map(mc, term->m, term->l, eval_term(ctx, term->args[0]));
        case Term::Kind::smear_prod:
            return smeared_product(mc, term->K, term->L, eval_term(ctx, term->args[0]),
                                   eval_term(ctx, term->args[1]));
        case Term::Kind::big_smear_prod:
            return big_smeared_product(mc, term->K, term->L, eval_term(ctx, term->args[0]),
                                       eval_term(ctx, term->args[1]));
        case Term::Kind::dlvp:
            return dlvp_map(mc, term->K, eval_term(ctx, term->args[0]));
        case Term::Kind::tau_poly:
            return smeared_polynomial(mc, term->poly, term->weights, term->bands,
                                      eval_term(ctx, term->args[0]));
    }
    throw BadInstantiation("unknown term node");
}

/// The radius guaranteed by the language's domain typing, given per-variable
/// radii.
inline double term_domain_bound(const TermPtr& term, const std::vector<double>& radii) {
    switch (term->kind) {
        case Term::Kind::var:
            return radii.at(static_cast<std::size_t>(term->var));
        case Term::Kind::zero:
            return 0.0;
        case Term::Kind::one:
        case Term::Kind::named:
            return 1.0;
        case Term::Kind::scale:
            return std::abs(term->lambda) * term_domain_bound(term->args[0], radii);
        case Term::Kind::add:
            return term_domain_bound(term->args[0], radii) + term_domain_bound(term->args[1], radii);
        case Term::Kind::star:
        case Term::Kind::sigma:
        case Term::Kind::gmap:
        case Term::Kind::fejer:
            return term_domain_bound(term->args[0], radii);
        case Term::Kind::smear_prod:
            return term_domain_bound(term->args[0], radii) * term_domain_bound(term->args[1], radii);
        case Term::Kind::big_smear_prod:
            return (2.0 * term->K + 3.0) * (2.0 * term->L + 3.0) *
                   term_domain_bound(term->args[0], radii) * term_domain_bound(term->args[1], radii);
        case Term::Kind::dlvp:
            return (2.0 * term->K + 1.0) * term_domain_bound(term->args[0], radii);
        case Term::Kind::tau_poly: {
            double n = term_domain_bound(term->args[0], radii);
            double acc = 0.0;
            for (const StarMonomial& mono : term->poly)
                acc += std::abs(mono.coeff) * std::pow(n, static_cast<double>(mono.stars.size()));
            return std::ceil(acc);
        }
    }
    throw BadInstantiation("unknown term node");
}

// ---------------------------------------------------------------------------
// Conditions

struct Condition;
using CondPtr = std::shared_ptr<const Condition>;

/// A closed condition evaluates to a real.  Relation leaves carry their
/// evaluator as a closure over the terms they mention.
struct Condition {
    enum class Kind { rel, constant, scale, add, sub, abs_of, max_of, min_of, sup, inf };

    Kind kind;
    std::string rel_name;
    std::function<double(EvalContext&)> rel;
    double value = 0.0;  // constant value or scale factor
    std::vector<CondPtr> children;
    int var = -1;        // sup / inf bound variable
    double radius = 1.0; // sup / inf domain radius
};

inline CondPtr c_rel(std::string name, std::function<double(EvalContext&)> fn) {
    auto c = std::make_shared<Condition>();
    c->kind = Condition::Kind::rel;
    c->rel_name = std::move(name);
    c->rel = std::move(fn);
    return c;
}
inline CondPtr c_const(double v) {
    auto c = std::make_shared<Condition>();
    c->kind = Condition::Kind::constant;
    c->value = v;
    return c;
}
inline CondPtr c_scale(double a, CondPtr body) {
    auto c = std::make_shared<Condition>();
    c->kind = Condition::Kind::scale;
    c->value = a;
    c->children = {std::move(body)};
    return c;
}
inline CondPtr c_add(std::vector<CondPtr> parts) {
    auto c = std::make_shared<Condition>();
    c->kind = Condition::Kind::add;
    c->children = std::move(parts);
    return c;
}
inline CondPtr c_sub(CondPtr a, CondPtr b) {
    auto c = std::make_shared<Condition>();
    c->kind = Condition::Kind::sub;
    c->children = {std::move(a), std::move(b)};
    return c;
}
inline CondPtr c_abs(CondPtr a) {
    auto c = std::make_shared<Condition>();
    c->kind = Condition::Kind::abs_of;
    c->children = {std::move(a)};
    return c;
}
inline CondPtr c_max(std::vector<CondPtr> parts) {
    auto c = std::make_shared<Condition>();
    c->kind = Condition::Kind::max_of;
    c->children = std::move(parts);
    return c;
}
inline CondPtr c_min(std::vector<CondPtr> parts) {
    auto c = std::make_shared<Condition>();
    c->kind = Condition::Kind::min_of;
    c->children = std::move(parts);
    return c;
}
inline CondPtr c_sup(int var, double radius, CondPtr body) {
    auto c = std::make_shared<Condition>();
    c->kind = Condition::Kind::sup;
    c->var = var;
    c->radius = radius;
    c->children = {std::move(body)};
    return c;
}
inline CondPtr c_inf(int var, double radius, CondPtr body) {
    auto c = std::make_shared<Condition>();
    c->kind = Condition::Kind::inf;
    c->var = var;
    c->radius = radius;
    c->children = {std::move(body)};
    return c;
}

// relation builders over terms

inline CondPtr rel_phi_r(TermPtr t) {
    return c_rel("phi_r", [t](EvalContext& ctx) { return ctx.mc->model().state(eval_term(ctx, t)).real(); });
}
inline CondPtr rel_phi_i(TermPtr t) {
    return c_rel("phi_i", [t](EvalContext& ctx) { return ctx.mc->model().state(eval_term(ctx, t)).imag(); });
}
inline CondPtr rel_d(TermPtr a, TermPtr b) {
    return c_rel("d", [a, b](EvalContext& ctx) {
        return metric(*ctx.mc, eval_term(ctx, a), eval_term(ctx, b));
    });
}
inline CondPtr rel_norm_star(TermPtr a) {
    return c_rel("d", [a](EvalContext& ctx) { return norm_star_spectral(*ctx.mc, eval_term(ctx, a)); });
}
/// |phi(a) - phi(b)| as a single leaf.
inline CondPtr rel_phi_gap(TermPtr a, TermPtr b) {
    return c_rel("phi_gap", [a, b](EvalContext& ctx) {
        return std::abs(ctx.mc->model().state(eval_term(ctx, a)) -
                        ctx.mc->model().state(eval_term(ctx, b)));
    });
}
inline CondPtr rel_form_r(double alpha, int N, int M, TermPtr a, TermPtr b) {
    return c_rel("E_r", [alpha, N, M, a, b](EvalContext& ctx) {
        const ModularCalculus& mc = *ctx.mc;
        return mc.form_alpha(alpha, fejer_map(mc, N, eval_term(ctx, a)),
                             fejer_map(mc, M, eval_term(ctx, b)))
            .real();
    });
}
inline CondPtr rel_form_i(double alpha, int N, int M, TermPtr a, TermPtr b) {
    return c_rel("E_i", [alpha, N, M, a, b](EvalContext& ctx) {
        const ModularCalculus& mc = *ctx.mc;
        return mc.form_alpha(alpha, fejer_map(mc, N, eval_term(ctx, a)),
                             fejer_map(mc, M, eval_term(ctx, b)))
            .imag();
    });
}

// ---------------------------------------------------------------------------
// Ball search

struct BallSearch {
    enum class Strategy { multi_start_descent, random_sampling, structured_witness };

    Strategy strategy = Strategy::multi_start_descent;
    int starts = 4;
    int iters = 30;
    double step = 0.5;
    int count = 24;  // random_sampling draws per variable chain
    std::uint64_t seed = 42;
};

struct EvalResult {
    double value = 0.0;
    std::string witness;  // label of the best structured/search point, if any
};

namespace detail {

struct Candidate {
    std::string label;
    std::vector<Operator> ops;  // one per variable of the quantifier chain
};

inline Operator clamp_to_ball(const Operator& x, double radius) {
    if (x.opnorm() <= radius || x.opnorm() == 0.0) return x;
    return (radius / x.opnorm()) * x;
}

inline std::vector<std::pair<std::string, Operator>> structured_elements(const ModularCalculus& mc,
                                                                         double radius,
                                                                         const std::map<std::string, Operator>* constants,
                                                                         std::mt19937_64& rng) {
    const Eigen::Index d = mc.model().dim();
    std::vector<std::pair<std::string, Operator>> out;
    out.emplace_back("0", mc.model().zero());
    out.emplace_back("1", mc.model().identity());
    const Eigen::Index cap = std::min<Eigen::Index>(d, 4);
    for (Eigen::Index i = 0; i < cap; ++i)
        for (Eigen::Index j = 0; j < cap; ++j)
            out.emplace_back("e" + std::to_string(i) + std::to_string(j),
                             radius * Operator::unit(d, i, j));
    if (d > 1) {
        Matrix sh = Matrix::Zero(d, d);
        for (Eigen::Index j = 0; j + 1 < d; ++j) sh(j + 1, j) = Complex(1.0, 0.0);
        out.emplace_back("shift", radius * Operator(sh));
        out.emplace_back("shift*", radius * Operator(sh).adjoint());
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int u = 0; u < 2; ++u) {
        Matrix h(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) h(i, j) = Complex(gauss(rng), gauss(rng));
        h = (h + h.adjoint().eval()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        Matrix uu = es.eigenvectors() *
                    (Complex(0.0, 1.0) * es.eigenvalues().cast<Complex>()).array().exp().matrix().asDiagonal() *
                    es.eigenvectors().adjoint();
        out.emplace_back("u" + std::to_string(u), Operator(uu));
    }
    for (double a : {0.0, 1.0}) {
        Matrix g(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
        Operator tr = mc.spectral_truncate(a, Operator(g));
        out.emplace_back("trunc" + std::to_string(static_cast<int>(a)), clamp_to_ball(tr, radius));
    }
    if (constants)
        for (const auto& [name, op] : *constants)
            if (op.opnorm() <= radius + 1e-12) out.emplace_back(name, op);
    return out;
}

inline Operator random_in_ball(const ModularCalculus& mc, double radius, std::mt19937_64& rng) {
    const Eigen::Index d = mc.model().dim();
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    Operator op(m);
    if (op.opnorm() > 0.0) op = (radius / op.opnorm()) * op;
    return op;
}

double eval_condition_impl(EvalContext& ctx, const CondPtr& cond, const BallSearch& search,
                           int depth, std::string* witness);

/// Joint search over a maximal chain of same-kind quantifiers.
inline double quantifier_search(EvalContext& ctx, const std::vector<int>& vars,
                                const std::vector<double>& radii, const CondPtr& body,
                                bool maximize, const BallSearch& search, int depth,
                                std::string* witness) {
    const ModularCalculus& mc = *ctx.mc;
    const double sign = maximize ? 1.0 : -1.0;
    BallSearch inner = search;
    if (depth >= 1) {  // keep nested quantifiers cheap
        inner.starts = 1;
        inner.iters = 8;
        inner.count = 6;
    }
    auto assign = [&](const std::vector<Operator>& ops) {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            ctx.vars[static_cast<std::size_t>(vars[i])] = ops[i];
            ctx.radii[static_cast<std::size_t>(vars[i])] = radii[i];
        }
    };
    auto score = [&](const std::vector<Operator>& ops) {
        assign(ops);
        return sign * eval_condition_impl(ctx, body, search, depth + 1, nullptr);
    };

    std::uint64_t salt = 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(depth) + 1) +
                         static_cast<std::uint64_t>(vars.front());
    std::mt19937_64 rng(search.seed ^ salt);

    std::vector<std::vector<std::pair<std::string, Operator>>> per_var;
    for (double r : radii)
        per_var.push_back(structured_elements(mc, r, ctx.constants, rng));

    std::vector<Operator> cur(vars.size(), mc.model().zero());
    std::vector<std::string> cur_labels(vars.size(), "0");
    double best = score(cur);

    // coordinate pass over structured elements, then random samples
    const bool sampling = search.strategy == BallSearch::Strategy::random_sampling;
    const int rounds = vars.size() > 1 ? 2 : 1;
    for (int round = 0; round < rounds; ++round) {
        for (std::size_t v = 0; v < vars.size(); ++v) {
            std::vector<Operator> trial = cur;
            if (search.strategy != BallSearch::Strategy::random_sampling) {
                for (const auto& [label, op] : per_var[v]) {
                    trial[v] = op;
                    double val = score(trial);
                    if (val > best) {
                        best = val;
                        cur = trial;
                        cur_labels[v] = label;
                    }
                }
            }
            if (search.strategy != BallSearch::Strategy::structured_witness) {
                int draws = sampling ? (depth >= 1 ? inner.count : search.count) : 8;
                for (int k = 0; k < draws; ++k) {
                    trial = cur;
                    trial[v] = random_in_ball(mc, radii[v], rng);
                    double val = score(trial);
                    if (val > best) {
                        best = val;
                        cur = trial;
                        cur_labels[v] = "sample";
                    }
                }
            }
        }
    }

    if (search.strategy == BallSearch::Strategy::multi_start_descent) {
        const Eigen::Index d = mc.model().dim();
        const int starts = depth >= 1 ? inner.starts : search.starts;
        const int iters = depth >= 1 ? inner.iters : search.iters;
        for (int start = 0; start < starts; ++start) {
            std::vector<Operator> pt = cur;
            if (start > 0)
                for (std::size_t v = 0; v < vars.size(); ++v)
                    pt[v] = random_in_ball(mc, radii[v], rng);
            double f = score(pt);
            double step = search.step;
            const double h = 1e-5;
            int stall = 0;
            for (int it = 0; it < iters && step > 1e-10 && stall < 2; ++it) {
                // numerical gradient over all chain variables
                std::vector<Matrix> grad(vars.size());
                for (std::size_t v = 0; v < vars.size(); ++v) {
                    grad[v] = Matrix::Zero(d, d);
                    for (Eigen::Index i = 0; i < d; ++i)
                        for (Eigen::Index j = 0; j < d; ++j) {
                            std::vector<Operator> p2 = pt;
                            Matrix mm = pt[v].mat();
                            mm(i, j) += Complex(h, 0.0);
                            p2[v] = clamp_to_ball(Operator(mm), radii[v]);
                            double dre = (score(p2) - f) / h;
                            mm(i, j) = pt[v].mat()(i, j) + Complex(0.0, h);
                            p2[v] = clamp_to_ball(Operator(mm), radii[v]);
                            double dim_ = (score(p2) - f) / h;
                            grad[v](i, j) = Complex(dre, dim_);
                        }
                }
                double gn = 0.0;
                for (const Matrix& g : grad) gn += g.squaredNorm();
                gn = std::sqrt(gn);
                if (gn < 1e-10) break;
                bool improved = false;
                while (step > 1e-10) {
                    std::vector<Operator> cand(vars.size(), mc.model().zero());
                    for (std::size_t v = 0; v < vars.size(); ++v)
                        cand[v] = clamp_to_ball(Operator(pt[v].mat() + step * grad[v]), radii[v]);
                    double fc = score(cand);
                    if (fc > f + 1e-14) {
                        pt = cand;
                        f = fc;
                        step *= 1.5;
                        improved = true;
                        break;
                    }
                    step *= 0.5;
                }
                if (!improved) ++stall;
            }
            if (f > best) {
                best = f;
                cur = pt;
                std::fill(cur_labels.begin(), cur_labels.end(), "descent");
            }
        }
    }

    if (witness) {
        std::string w;
        for (std::size_t v = 0; v < vars.size(); ++v) {
            if (v) w += ",";
            w += cur_labels[v];
        }
        *witness = w;
    }
    double out = sign * best;
    for (int v : vars) ctx.vars[static_cast<std::size_t>(v)].reset();
    return out;
}

inline double eval_condition_impl(EvalContext& ctx, const CondPtr& cond, const BallSearch& search,
                                  int depth, std::string* witness) {
    switch (cond->kind) {
        case Condition::Kind::rel:
            return cond->rel(ctx);
        case Condition::Kind::constant:
            return cond->value;
        case Condition::Kind::scale:
            return cond->value * eval_condition_impl(ctx, cond->children[0], search, depth, witness);
        case Condition::Kind::add: {
            double acc = 0.0;
            for (const CondPtr& c : cond->children)
                acc += eval_condition_impl(ctx, c, search, depth, nullptr);
            return acc;
        }
        case Condition::Kind::sub:
            return eval_condition_impl(ctx, cond->children[0], search, depth, nullptr) -
                   eval_condition_impl(ctx, cond->children[1], search, depth, nullptr);
        case Condition::Kind::abs_of:
            return std::abs(eval_condition_impl(ctx, cond->children[0], search, depth, nullptr));
        case Condition::Kind::max_of: {
            double acc = -std::numeric_limits<double>::infinity();
            for (const CondPtr& c : cond->children)
                acc = std::max(acc, eval_condition_impl(ctx, c, search, depth, nullptr));
            return acc;
        }
        case Condition::Kind::min_of: {
            double acc = std::numeric_limits<double>::infinity();
            for (const CondPtr& c : cond->children)
                acc = std::min(acc, eval_condition_impl(ctx, c, search, depth, nullptr));
            return acc;
        }
        case Condition::Kind::sup:
        case Condition::Kind::inf: {
            const bool maximize = cond->kind == Condition::Kind::sup;
            std::vector<int> vars;
            std::vector<double> radii;
            const Condition* node = cond.get();
            CondPtr body = cond->children[0];
            vars.push_back(node->var);
            radii.push_back(node->radius);
            while (body->kind == node->kind) {
                vars.push_back(body->var);
                radii.push_back(body->radius);
                CondPtr next = body->children[0];
                body = next;
            }
            std::size_t need = 0;
            for (int v : vars) need = std::max(need, static_cast<std::size_t>(v) + 1);
            if (ctx.vars.size() < need) ctx.vars.resize(need);
            if (ctx.radii.size() < need) ctx.radii.resize(need, 1.0);
            return quantifier_search(ctx, vars, radii, body, maximize, search, depth, witness);
        }
    }
    throw BadInstantiation("unknown condition node");
}

} // namespace detail

/// Evaluates a closed condition: Sup nodes report the best value found by the
/// strategy plus the structured witnesses (never claimed as the exact sup).
inline EvalResult eval_condition(const ModularCalculus& mc, const CondPtr& cond,
                                 const BallSearch& search,
                                 const std::map<std::string, Operator>* constants = nullptr) {
    EvalContext ctx{&mc, constants, {}, {}};
    EvalResult out;
    out.value = detail::eval_condition_impl(ctx, cond, search, 0, &out.witness);
    return out;
}

// ---------------------------------------------------------------------------
// Axiom library

struct AxiomInstance {
    std::string id;
    CondPtr condition;
    double tolerance = 1e-10;
    bool inf_type = false;
    bool expected_fail = false;
};

/// Which finite tuples to instantiate the axiom schemas at.
struct AxiomInstantiation {
    std::vector<double> times = {0.25, -0.25, 1.0};
    std::vector<int> bands = {1, 2};
    std::vector<int> grid_ns = {2, 3};
    double radius = 2.0;          // default ball for universal quantifiers
    double gamma = 0.0;           // lattice spacing for (21)-(23); 0 disables
    bool has_matrix_units = false;
    int levels = 0;
    double renorm_c = 1.0;
    bool corner_scalar = true;    // whether the w_00 corner is one-dimensional
    double tol_exact = 1e-10;
    double tol_riemann = 1e-9;
    double tol_inf = 0.01;
};

namespace detail {

inline std::string fmt(double v) {
    std::string s = std::to_string(v);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

/// AST mirror of the nested-M expansion p'(sum_i lambda_i F_{N_i}(x)).
inline TermPtr p_dot_term(const StarPolynomial& p, const std::vector<double>& lambda,
                          const std::vector<int>& bands, const TermPtr& x) {
    TermPtr out = t_zero();
    const std::size_t nw = lambda.size();
    for (const StarMonomial& mono : p) {
        if (mono.stars.empty()) {
            out = t_add(out, t_scale(mono.coeff, t_one()));
            continue;
        }
        const std::size_t k = mono.stars.size();
        std::vector<int> tuple(k, 0);
        while (true) {
            Complex w = mono.coeff;
            for (std::size_t j = 0; j < k; ++j) w *= lambda[static_cast<std::size_t>(tuple[j])];
            if (std::abs(w) > 0.0) {
                auto factor = [&](std::size_t j) {
                    TermPtr f = mono.stars[j] ? t_star(x) : x;
                    return f;
                };
                TermPtr word;
                if (k == 1) {
                    word = t_fejer(bands[static_cast<std::size_t>(tuple[0])], 0.0, factor(0));
                } else {
                    word = t_smear(bands[static_cast<std::size_t>(tuple[k - 2])],
                                   bands[static_cast<std::size_t>(tuple[k - 1])], factor(k - 2),
                                   factor(k - 1));
                    int acc_band = bands[static_cast<std::size_t>(tuple[k - 2])] +
                                   bands[static_cast<std::size_t>(tuple[k - 1])];
                    for (std::size_t j = k - 2; j-- > 0;) {
                        int nj = bands[static_cast<std::size_t>(tuple[j])];
                        word = t_bigsmear(nj, acc_band, t_fejer(nj, 0.0, factor(j)), word);
                        acc_band += nj;
                    }
                }
                out = t_add(out, t_scale(w, word));
            }
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

// helper formulas of the III_lambda axioms

inline double xi_value(EvalContext& ctx, int K, const TermPtr& t) {
    const ModularCalculus& mc = *ctx.mc;
    Operator a = eval_term(ctx, t);
    double q = mc.model().state(big_smeared_product(mc, K, K, a.adjoint(), a)).real() -
               std::norm(mc.model().state(a));
    return std::sqrt(std::max(0.0, q));
}

inline TermPtr com_term(int K, const TermPtr& a, const TermPtr& b) {
    return t_add(t_smear(K, K, b, a), t_scale(Complex(-1.0, 0.0), t_smear(K, K, a, b)));
}

inline TermPtr proj_term(int K, const TermPtr& a) {
    TermPtr p = t_smear(K, K, a, t_star(a));
    return t_add(p, t_scale(Complex(-1.0, 0.0), t_smear(2 * K, 2 * K, p, t_star(p))));
}

/// w_kk x w_jj via the smeared-product composition of (25).
inline TermPtr corner_term(int N, const TermPtr& w_left, const TermPtr& x, const TermPtr& w_right) {
    return t_bigsmear(N, 0, t_bigsmear(0, N, w_left, t_fejer(N, 0.0, x)), w_right);
}

} // namespace detail

inline std::vector<AxiomInstance> axiom_library(const AxiomInstantiation& inst) {
    using detail::fmt;
    std::vector<AxiomInstance> out;
    const double m = inst.radius;
    const Complex lam(0.3, -0.7), mu(-1.2, 0.4);
    TermPtr x = t_var(0), y = t_var(1), z = t_var(2);

    auto sup1 = [&](CondPtr body, double r = 0.0) {
        return c_sup(0, r > 0 ? r : m, std::move(body));
    };
    auto sup2 = [&](CondPtr body, double r = 0.0) {
        double rr = r > 0 ? r : m;
        return c_sup(0, rr, c_sup(1, rr, std::move(body)));
    };
    auto sup3 = [&](CondPtr body) { return c_sup(0, m, c_sup(1, m, c_sup(2, m, std::move(body)))); };
    auto push = [&](std::string id, CondPtr cond, double tol, bool inf_type = false,
                    bool expected_fail = false) {
        out.push_back({std::move(id), std::move(cond), tol, inf_type, expected_fail});
    };

    // (1) vector space laws
    push("A01", sup3(c_max({
                    rel_d(t_add(x, t_add(y, z)), t_add(t_add(x, y), z)),
                    rel_d(t_add(x, t_zero()), x),
                    rel_d(t_add(x, t_scale(-1.0, x)), t_zero()),
                    rel_d(t_add(x, y), t_add(y, x)),
                    rel_d(t_scale(lam, t_scale(mu, x)), t_scale(lam * mu, x)),
                    rel_d(t_scale(lam, t_add(x, y)), t_add(t_scale(lam, x), t_scale(lam, y))),
                    rel_d(t_scale(lam + mu, x), t_add(t_scale(lam, x), t_scale(mu, x))),
                    rel_d(t_scale(1.0, x), x),
                })),
         inst.tol_exact);

    // (2) smeared product laws
    for (auto [K, L] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}}) {
        push("A02[K=" + std::to_string(K) + ",L=" + std::to_string(L) + "]",
             sup2(c_max({
                 rel_d(t_add(t_scale(lam, t_smear(K, L, x, y)), t_smear(K, L, x, x)),
                       t_smear(K, L, x, t_add(t_scale(lam, y), x))),
                 rel_d(t_smear(K, L, t_fejer(L, 0.0, x), y), t_smear(L, L, t_fejer(K, 0.0, x), y)),
                 rel_d(t_dlvp(K + L, t_fejer(K, 0.0, x)), t_fejer(K, 0.0, x)),
                 rel_d(t_dlvp(K + L + 1, t_smear(K, L, x, y)), t_smear(K, L, x, y)),
             })),
             inst.tol_exact);
    }
    // (2) associativity display
    for (auto [K1, K2, K3] : std::vector<std::array<int, 3>>{{1, 1, 1}, {1, 2, 1}}) {
        TermPtr inner12 = t_smear(K1, K2, x, y);
        TermPtr inner23 = t_smear(K2, K3, y, z);
        TermPtr lhs = t_add(
            t_scale(K1 + K2 + 2.0, t_smear(K1 + K2 + 2, K3, inner12, z)),
            t_scale(-(K1 + K2 + 1.0), t_smear(K1 + K2 + 1, K3, inner12, z)));
        TermPtr rhs = t_add(
            t_scale(K3 + K2 + 2.0, t_smear(K1, K2 + 2 + K3, x, inner23)),
            t_scale(-(K3 + K2 + 1.0), t_smear(K1, K2 + 1 + K3, x, inner23)));
        push("A02assoc[" + std::to_string(K1) + std::to_string(K2) + std::to_string(K3) + "]",
             sup3(rel_d(lhs, rhs)), inst.tol_exact);
    }

    // (3) involution laws
    push("A03", sup2(c_max({
                    rel_d(t_star(t_star(x)), x),
                    rel_d(t_star(t_add(x, y)), t_add(t_star(x), t_star(y))),
                    rel_d(t_star(t_scale(lam, x)), t_scale(std::conj(lam), t_star(x))),
                })),
         inst.tol_exact);

    // (4) adjoints of smeared products, isometry of * for d
    for (auto [K, L] : std::vector<std::pair<int, int>>{{1, 2}}) {
        push("A04", sup2(c_max({
                        rel_d(t_star(t_smear(K, L, x, y)), t_smear(L, K, t_star(y), t_star(x))),
                        rel_d(t_fejer(L, 0.0, t_star(x)), t_star(t_fejer(L, 0.0, x))),
                        c_abs(c_sub(rel_d(x, t_zero()), rel_d(t_star(x), t_zero()))),
                    })),
             inst.tol_exact);
    }

    // (5) translation invariance of the metric
    push("A05", sup2(c_abs(c_sub(rel_d(x, y), rel_d(t_add(x, t_scale(-1.0, y)), t_zero())))),
         inst.tol_exact);

    // (6) unit laws
    for (int N : inst.bands)
        push("A06[N=" + std::to_string(N) + "]",
             sup1(c_max({
                 rel_d(t_fejer(N, 0.0, t_one()), t_one()),
                 rel_d(t_smear(1, N, t_one(), x), t_fejer(N, 0.0, x)),
                 rel_d(t_smear(N, 1, x, t_one()), t_fejer(N, 0.0, x)),
             })),
             inst.tol_exact);

    // (7)+(8) state laws
    push("A07", sup2(c_max({
                    c_abs(c_add({rel_phi_r(t_add(x, y)), c_scale(-1.0, rel_phi_r(x)),
                                 c_scale(-1.0, rel_phi_r(y))})),
                    c_abs(c_add({rel_phi_i(t_add(x, y)), c_scale(-1.0, rel_phi_i(x)),
                                 c_scale(-1.0, rel_phi_i(y))})),
                })),
         inst.tol_exact);
    push("A08",
         sup1(c_max({
             c_abs(c_sub(rel_phi_r(t_star(x)), rel_phi_r(x))),
             c_abs(c_add({rel_phi_i(t_star(x)), rel_phi_i(x)})),
             c_abs(c_sub(rel_phi_r(t_scale(lam, x)),
                         c_add({c_scale(lam.real(), rel_phi_r(x)), c_scale(-lam.imag(), rel_phi_i(x))}))),
             c_abs(c_sub(rel_phi_i(t_scale(lam, x)),
                         c_add({c_scale(lam.imag(), rel_phi_r(x)), c_scale(lam.real(), rel_phi_i(x))}))),
             c_abs(c_sub(rel_phi_r(t_one()), c_const(1.0))),
         })),
         inst.tol_exact);

    // (9) positivity: the Gram matrix of smeared vectors is PSD
    {
        std::vector<int> Ks = {inst.bands[0], inst.bands.size() > 1 ? inst.bands[1] : inst.bands[0]};
        push("A09", sup2(c_rel("gram", [Ks](EvalContext& ctx) {
                 const ModularCalculus& mc = *ctx.mc;
                 const std::size_t n = Ks.size();
                 Matrix g(n, n);
                 for (std::size_t i = 0; i < n; ++i)
                     for (std::size_t j = 0; j < n; ++j) {
                         Operator xi = *ctx.vars[i], xj = *ctx.vars[j];
                         g(i, j) = mc.model().state(
                             smeared_product(mc, Ks[i], Ks[j], xi.adjoint(), xj));
                     }
                 Eigen::SelfAdjointEigenSolver<Matrix> es((g + g.adjoint().eval()) / 2.0);
                 return std::max(0.0, -es.eigenvalues().minCoeff());
             })),
             inst.tol_exact);
    }

    // (10) smeared multiplication is dominated by n^2 on D_n
    {
        int K = inst.bands[0];
        std::vector<int> Ks = {inst.bands[0], inst.bands.size() > 1 ? inst.bands[1] : inst.bands[0]};
        double n_dom = m;
        push("A10", c_sup(2, n_dom, sup2(c_rel("gram_dom", [Ks, K, n_dom](EvalContext& ctx) {
                 const ModularCalculus& mc = *ctx.mc;
                 Operator a = *ctx.vars[2];
                 const std::size_t n = Ks.size();
                 Matrix g(n, n);
                 for (std::size_t i = 0; i < n; ++i)
                     for (std::size_t j = 0; j < n; ++j) {
                         Operator ui = smeared_product(mc, K, Ks[i], a, *ctx.vars[i]);
                         Operator uj = smeared_product(mc, K, Ks[j], a, *ctx.vars[j]);
                         g(i, j) = mc.model().state(big_smeared_product(mc, K + Ks[i], K + Ks[j],
                                                                        ui.adjoint(), uj)) -
                                   n_dom * n_dom *
                                       mc.model().state(smeared_product(mc, Ks[i], Ks[j],
                                                                        (*ctx.vars[i]).adjoint(),
                                                                        *ctx.vars[j]));
                     }
                 Eigen::SelfAdjointEigenSolver<Matrix> es((g + g.adjoint().eval()) / 2.0);
                 return std::max(0.0, es.eigenvalues().maxCoeff());
             }))),
             inst.tol_exact);
    }

    // (11) tau agrees with the nested-M expansion
    {
        StarPolynomial p{{Complex(1.0, 0.0), {false, true, false}}, {Complex(0.5, -0.5), {true}}};
        std::vector<double> lambda{0.5, 0.5};
        std::vector<int> bands{inst.bands[0], inst.bands.size() > 1 ? inst.bands[1] : inst.bands[0]};
        push("A11",
             sup1(c_max({
                 rel_d(t_tau(p, lambda, bands, x), detail::p_dot_term(p, lambda, bands, x)),
                 // cross-check the nested-M expansion against true products
                 c_rel("tau_direct", [p, lambda, bands](EvalContext& ctx) {
                     return metric(*ctx.mc,
                                   smeared_polynomial(*ctx.mc, p, lambda, bands, *ctx.vars[0]),
                                   polynomial_direct(*ctx.mc, p, lambda, bands, *ctx.vars[0]));
                 }),
             }), 1.0),
             inst.tol_exact);
    }

    // (12) the operator-ball trick
    for (int K : inst.bands) {
        int K1 = inst.bands[0];
        double l = 1.0;
        TermPtr lhs = t_add(t_fejer(K, 0.0, x), t_smear(K1, K, y, x));
        TermPtr rhs = t_add(t_one(), t_fejer(K1, 0.0, y));
        push("A12[K=" + std::to_string(K) + "]",
             c_sup(0, m, c_sup(1, l, c_max({c_const(0.0),
                                            c_sub(rel_norm_star(lhs),
                                                  c_scale(3.0 * m * std::exp(K), rel_norm_star(rhs)))}))),
             inst.tol_exact);
    }

    // (13) modular group laws
    for (auto [t, s] : std::vector<std::pair<double, double>>{{0.25, -0.25}, {1.0, 0.25}}) {
        push("A13[t=" + fmt(t) + ",s=" + fmt(s) + "]",
             sup2(c_max({
                 rel_d(t_sigma(t, t_sigma(s, x)), t_sigma(t + s, x)),
                 rel_d(t_sigma(t, t_add(t_scale(lam, x), y)),
                       t_add(t_scale(lam, t_sigma(t, x)), t_sigma(t, y))),
                 rel_d(t_sigma(0.0, x), x),
                 rel_d(t_sigma(t, t_star(x)), t_star(t_sigma(t, x))),
                 rel_phi_gap(t_sigma(t, x), x),
             })),
             inst.tol_exact);
    }

    // (14) flow commutes with smearing
    for (auto [t, K, L] : std::vector<std::array<double, 3>>{{0.25, 1, 2}, {1.0, 2, 1}}) {
        int Ki = static_cast<int>(K), Li = static_cast<int>(L);
        push("A14[t=" + fmt(t) + "]",
             sup2(c_max({
                 rel_d(t_sigma(t, t_smear(Ki, Li, x, y)),
                       t_smear(Ki, Li, t_sigma(t, x), t_sigma(t, y))),
                 rel_d(t_sigma(t, t_fejer(Ki, 0.0, x)), t_fejer(Ki, 0.0, t_sigma(t, x))),
             })),
             inst.tol_exact);
    }

    // (15) Lipschitz continuity of the flow
    for (double t : {0.25, 1.0}) {
        push("A15[t=" + fmt(t) + "]",
             sup1(c_max({c_const(0.0),
                         c_sub(rel_d(t_sigma(t, x), x), c_const(4.0 * std::abs(t) * m))})),
             inst.tol_exact);
    }

    // (16) G_s as a Riemann sum
    for (double s : {0.0, 1.0})
        for (int n : inst.grid_ns) {
            push("A16[s=" + fmt(s) + ",n=" + std::to_string(n) + "]",
                 sup1(c_rel("ax16", [s, n, m](EvalContext& ctx) {
                     return axiom16_check(*ctx.mc, s, n, *ctx.vars[0], m);
                 })),
                 inst.tol_riemann);
        }

    // (17) the norm identity for smeared combinations
    {
        std::vector<Complex> lams{Complex(0.7, 0.2), Complex(-0.3, 0.5)};
        std::vector<int> Ks{inst.bands[0], inst.bands.size() > 1 ? inst.bands[1] : inst.bands[0]};
        push("A17", sup2(c_rel("ax17", [lams, Ks](EvalContext& ctx) {
                 auto [lhs, rhs] =
                     axiom17_identity(*ctx.mc, lams, Ks, {*ctx.vars[0], *ctx.vars[1]});
                 return std::abs(lhs - rhs);
             })),
             inst.tol_riemann);
    }

    // (18) Fejer maps as Riemann sums
    for (auto [N, l] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {2.0, -0.5}})
        for (int n : inst.grid_ns) {
            push("A18[N=" + fmt(N) + ",l=" + fmt(l) + ",n=" + std::to_string(n) + "]",
                 sup1(c_rel("ax18", [N, l, n, m](EvalContext& ctx) {
                     return axiom18_check(*ctx.mc, N, l, n, *ctx.vars[0], m);
                 })),
                 inst.tol_riemann);
        }

    // (19) base case and recursion for the forms
    {
        int K = inst.bands[0], L = inst.bands.size() > 1 ? inst.bands[1] : inst.bands[0];
        push("A19base", sup2(c_rel("ax19b", [K, L](EvalContext& ctx) {
                 const ModularCalculus& mc = *ctx.mc;
                 Complex lhs = mc.form_alpha(0.0, fejer_map(mc, K, *ctx.vars[0]),
                                             fejer_map(mc, L, *ctx.vars[1]));
                 Complex rhs = mc.model().state(
                     smeared_product(mc, K, L, (*ctx.vars[0]).adjoint(), *ctx.vars[1]));
                 return std::abs(lhs - rhs);
             })),
             inst.tol_exact);
        for (auto [alpha, beta] : std::vector<std::pair<double, double>>{{1.0 / 3.0, 1.0 / 3.0},
                                                                         {0.25, 0.0}})
            for (int n : inst.grid_ns)
                push("A19[a=" + fmt(alpha) + ",b=" + fmt(beta) + ",n=" + std::to_string(n) + "]",
                     sup2(c_rel("ax19", [alpha, beta, n, K, L, m](EvalContext& ctx) {
                         return form_recursion(*ctx.mc, alpha, beta, n, K, L, *ctx.vars[0],
                                               *ctx.vars[1], m)
                             .margin;
                     })),
                     inst.tol_riemann);
        for (int n : inst.grid_ns)
            push("A20[n=" + std::to_string(n) + "]",
                 sup2(c_rel("ax20", [n, K, L, m](EvalContext& ctx) {
                     int KK = std::max(K, L), LL = std::min(K, L);
                     return form_top_level(*ctx.mc, 1.0 / 3.0, n, KK, LL, *ctx.vars[0],
                                           *ctx.vars[1], m)
                         .margin;
                 })),
                 inst.tol_riemann);
    }

    // (21)-(23): spectrum lattice axioms, present only when gamma is set
    if (inst.gamma > 0.0) {
        const double g = inst.gamma;
        for (int j = 1; j <= 2; ++j)
            for (double sgn : {1.0, -1.0}) {
                double l = sgn * (j - 0.5) * g, N = 0.5 * g;
                push("A21[l=" + fmt(l) + ",N=" + fmt(N) + "]",
                     sup1(rel_d(t_fejer(N, l, x), t_zero()), 1.0), inst.tol_exact);
            }
        {
            // the interval ]l-N,l+N[ must isolate the lattice point log(lambda)
            double l = -g, N = 0.5 * g;
            int c = static_cast<int>(std::ceil(std::abs(l) + N)) + 1;
            push("A22", c_inf(0, 1.0, c_max({
                            rel_d(t_bigsmear(c, c, t_star(x), x), t_one()),
                            rel_d(t_add(t_scale(2.0, t_fejer(N, l, x)),
                                        t_scale(-1.0, t_fejer(N / 2.0, l, x))),
                                  x),
                        })),
                 inst.tol_inf, true, true);
        }
        {
            double N = 0.5 * g;
            if (!(N < g)) throw BadInstantiation("axiom (23) needs N < |log(lambda)|");
            int K = std::max(1, static_cast<int>(std::ceil(N)));
            TermPtr fx = t_fejer(N, 0.0, x);
            CondPtr xi = c_rel("xi", [K, fx](EvalContext& ctx) { return detail::xi_value(ctx, K, fx); });
            TermPtr com = detail::com_term(K, fx, y);
            CondPtr eta = c_sup(1, 1.0, rel_phi_r(t_bigsmear(2 * K, 2 * K, t_star(com), com)));
            CondPtr sup_display = c_sup(0, 1.0, c_max({c_const(0.0), c_sub(xi, eta)}));
            TermPtr pr = detail::proj_term(K, fx);
            CondPtr inf_display =
                c_inf(0, 1.0, c_add({
                          rel_phi_r(t_smear(4 * K, 4 * K, t_star(pr), pr)),
                          c_abs(c_sub(rel_phi_r(t_bigsmear(K, K, fx, t_fejer(N, 0.0, t_star(x)))),
                                      c_const(1.0 / M_PI))),
                      }));
            push("A23", c_max({sup_display, inf_display}), inst.tol_inf, true, true);
        }
    }

    // (24)-(27): geometric-state axioms, present only with matrix units
    if (inst.has_matrix_units && inst.levels >= 2) {
        const int J = std::min(inst.levels, 3);
        const double c = inst.renorm_c;
        auto w = [](int j, int k) { return t_const("w_" + std::to_string(j) + "_" + std::to_string(k)); };
        auto band = [](int j, int k) {
            return static_cast<int>(std::ceil(std::abs(j - k) * std::log(2.0)));
        };
        {
            std::vector<CondPtr> parts;
            for (int j = 0; j < J; ++j)
                for (int k = 0; k < J; ++k) {
                    if (j == k)
                        parts.push_back(c_abs(c_sub(rel_phi_r(w(j, j)),
                                                    c_const(c * std::pow(2.0, -j - 1)))));
                    else
                        parts.push_back(rel_phi_gap(w(j, k), t_zero()));
                    parts.push_back(rel_d(t_star(w(k, j)), w(j, k)));
                    parts.push_back(rel_d(t_dlvp(band(j, k) + 1, w(j, k)), w(j, k)));
                }
            for (int j = 0; j < J; ++j)
                for (int k = 0; k < J; ++k)
                    for (int l = 0; l < J; ++l)
                        for (int mm = 0; mm < J; ++mm) {
                            TermPtr prod = t_bigsmear(band(j, k), band(l, mm), w(j, k), w(l, mm));
                            TermPtr target = k == l ? w(j, mm) : t_zero();
                            parts.push_back(rel_d(prod, target));
                        }
            push("A24[renorm_c=" + fmt(c) + "]", c_max(parts), inst.tol_exact);
        }
        for (int N : inst.bands) {
            TermPtr cx = detail::corner_term(N, w(0, 0), x, w(0, 0));
            TermPtr cy = detail::corner_term(N, w(0, 0), y, w(0, 0));
            push("A25[N=" + std::to_string(N) + "]",
                 sup2(c_max({
                     rel_d(t_dlvp(1, cx), cx),
                     rel_phi_gap(t_bigsmear(0, 0, cx, cy), t_bigsmear(0, 0, cy, cx)),
                 }), 1.0),
                 inst.tol_exact);
        }
        {
            TermPtr cx = detail::corner_term(1, w(0, 0), x, w(0, 0));
            TermPtr cy = detail::corner_term(1, w(0, 0), y, w(0, 0));
            CondPtr xi = c_rel("xi", [cx](EvalContext& ctx) { return detail::xi_value(ctx, 1, cx); });
            TermPtr com = detail::com_term(1, cx, y);
            CondPtr eta = c_sup(1, 1.0, rel_phi_r(t_bigsmear(2, 2, t_star(com), com)));
            CondPtr sup_display = c_sup(0, 1.0, c_max({c_const(0.0), c_sub(xi, eta)}));
            TermPtr pr = detail::proj_term(1, cx);
            TermPtr cxs = detail::corner_term(1, w(0, 0), t_star(x), w(0, 0));
            CondPtr inf_display =
                c_inf(0, 1.0, c_add({
                          rel_phi_r(t_smear(4, 4, t_star(pr), pr)),
                          c_abs(c_sub(rel_phi_r(t_bigsmear(1, 1, cx, cxs)), c_const(1.0 / M_PI))),
                      }));
            push("A26", c_max({sup_display, inf_display}), inst.tol_inf, true, true);
            // (27): the corner state is multiplicative, with the truncation
            // renormalization 2/c in place of the infinite-level factor 2
            push("A27[renorm_c=" + fmt(c) + "]",
                 sup2(c_abs(c_sub(rel_phi_r(t_bigsmear(0, 0, cx, cy)),
                                  c_rel("phiphi", [cx, cy, c](EvalContext& ctx) {
                                      Complex a = ctx.mc->model().state(eval_term(ctx, cx));
                                      Complex b = ctx.mc->model().state(eval_term(ctx, cy));
                                      return (2.0 / c) * (a * b).real();
                                  }))),
                      1.0),
                 inst.tol_exact, false, !inst.corner_scalar);
        }
    }

    return out;
}

// ---------------------------------------------------------------------------
// Suite runner

struct AxiomReport {
    std::string axiom;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string witness;
    long wall_time_ms = 0;
    bool expected_fail = false;  // not serialized; drives exit-code logic
};

/// Runs the instantiated axioms whose number is listed in `which` (empty =
/// all).  Reports are sorted by axiom id and deterministic under a fixed seed.
inline std::vector<AxiomReport> run_suite(const WStarModel& model,
                                          const std::vector<int>& which, const BallSearch& search,
                                          const AxiomInstantiation& inst,
                                          const std::map<std::string, Operator>* constants = nullptr,
                                          bool measure_time = false) {
    ModularCalculus mc(model);
    auto instances = axiom_library(inst);
    auto selected = [&](const std::string& id) {
        if (which.empty()) return true;
        int num = std::stoi(id.substr(1, 2));
        for (int w : which)
            if (w == num) return true;
        return false;
    };
    std::vector<AxiomReport> reports;
    for (const AxiomInstance& a : instances) {
        if (!selected(a.id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        EvalResult r = eval_condition(mc, a.condition, search, constants);
        auto t1 = std::chrono::steady_clock::now();
        AxiomReport rep;
        rep.axiom = a.id;
        rep.value = r.value;
        rep.tolerance = a.tolerance;
        rep.pass = r.value <= a.tolerance;
        rep.witness = rep.pass ? std::string() : r.witness;
        rep.wall_time_ms = measure_time
                               ? std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
                               : 0;
        rep.expected_fail = a.expected_fail;
        reports.push_back(std::move(rep));
    }
    std::sort(reports.begin(), reports.end(),
              [](const AxiomReport& a, const AxiomReport& b) { return a.axiom < b.axiom; });
    return reports;
}

} // namespace wstar
