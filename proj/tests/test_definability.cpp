#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "wstar/definability.hpp"

using namespace wstar;
using wstar::testing::model_23;
using wstar::testing::random_operator;
using wstar::testing::tracial;

TEST_CASE("psi_prime on a tracial model") {
    auto m = tracial(3);
    ModularCalculus mc(m);
    std::mt19937_64 rng(7);
    Operator x = random_operator(3, rng), y = random_operator(3, rng);
    // at u = 1 the minimizer is X/2 and the value is ||X xi||^2 / 2
    auto r = psi_variational(mc, 1, 2, 1.0, x, y, PsiMode::spectral);
    Operator X = fejer_map(mc, 1, y) + fejer_map(mc, 2, x);
    CHECK((r.argmin - 0.5 * X).opnorm() < 1e-12);
    double half_norm = 0.5 * m.gns_inner(X, X).real();
    CHECK(r.value == Catch::Approx(half_norm).margin(1e-12));
}

TEST_CASE("psi_prime modes agree and the minimizer stays bounded") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(11);
    for (double u : {1e-3, 0.1, 0.5}) {
        for (int trial = 0; trial < 50; ++trial) {
            Operator x = random_operator(2, rng, 1.0), y = random_operator(2, rng, 1.0);
            int K = 1 + trial % 2, L = 1 + (trial / 2) % 2;
            auto sp = psi_variational(mc, K, L, u, x, y, PsiMode::spectral);
            auto mn = psi_variational(mc, K, L, u, x, y, PsiMode::minimizer);
            auto nu = psi_variational(mc, K, L, u, x, y, PsiMode::numeric);
            CHECK(std::abs(sp.value - mn.value) < 1e-9);
            CHECK(std::abs(sp.value - nu.value) < 1e-9);
            CHECK(nu.value >= sp.value - 1e-9);  // a search cannot beat the true minimum
            CHECK(sp.argmin.opnorm() <= psi_minimizer_radius(K, L, u));
        }
    }
    CHECK_THROWS_AS(psi_variational(mc, 1, 1, 0.0, m.identity(), m.identity()), NonPositiveU);
}

TEST_CASE("psi form routes and polarization") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        Operator x = random_operator(2, rng), y = random_operator(2, rng);
        double u = 0.05 + 0.3 * (trial % 5);
        int K = 1 + trial % 2, L = 2 - trial % 2;
        Complex lang = psi_form(mc, K, L, u, x, y);
        Complex spec = psi_form_spectral(mc, K, L, u, x, y);
        CHECK(std::abs(lang - spec) < 1e-10);

        // psi(x,y) = (1/4) sum_k (-i)^k psi'(i^k x, y)
        Complex pol(0.0, 0.0), ik(1.0, 0.0), mik(1.0, 0.0);
        for (int k = 0; k < 4; ++k) {
            auto q = psi_variational(mc, K, L, u, ik * x, y, PsiMode::spectral);
            pol += mik * q.value;
            ik *= Complex(0.0, 1.0);
            mik *= Complex(0.0, -1.0);
        }
        pol *= 0.25;
        CHECK(std::abs(pol - spec) < 1e-10);
    }

    // tracial closed form: psi = (1/(1+u)) phi(F_K(y^*) F_L(x))
    auto mt = tracial(2);
    ModularCalculus mct(mt);
    Operator x = random_operator(2, rng), y = random_operator(2, rng);
    double u = 0.4;
    Complex expect = mt.state(fejer_map(mct, 1, y).adjoint() * fejer_map(mct, 2, x)) / (1.0 + u);
    CHECK(std::abs(psi_form(mct, 1, 2, u, x, y) - expect) < 1e-12);
}

TEST_CASE("psi_multi resolvent products") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(17);
    Operator x = random_operator(2, rng, 1.0), y = random_operator(2, rng, 1.0);

    auto distinct = psi_multi(mc, 1, 2, {0.2, 0.7}, x, y);
    CHECK(distinct.perturbation_bound == 0.0);
    CHECK(std::abs(distinct.constructive - distinct.spectral) < 1e-12);

    auto same = psi_multi(mc, 1, 2, {0.3, 0.3}, x, y);
    CHECK(same.perturbation_bound > 0.0);
    CHECK(std::abs(same.constructive - same.spectral) <= same.perturbation_bound + 1e-9);

    auto triple = psi_multi(mc, 1, 1, {0.3, 0.3, 0.3}, x, y);
    CHECK(std::abs(triple.constructive - triple.spectral) <= triple.perturbation_bound + 1e-9);

    CHECK_THROWS_AS(psi_multi(mc, 1, 1, {}, x, y), BadParameters);
    CHECK_THROWS_AS(psi_multi(mc, 1, 1, {0.5, -0.1}, x, y), NonPositiveU);
}

TEST_CASE("chain map A agrees with its resolvent formula") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(19);
    for (double u : {1e-3, 0.1, 0.5}) {
        ChainMapParams p;
        p.u = u;
        p.K = 2;
        Operator x = random_operator(2, rng);
        auto r = chain_map(mc, ChainMap::A_res, p, x);
        CHECK((r.approx - r.exact).opnorm() < 1e-10);
    }
    // tracial case: A = (u+1)^{-1} F_K
    auto mt = tracial(2);
    ModularCalculus mct(mt);
    Operator x = random_operator(2, rng);
    ChainMapParams p;
    p.u = 0.5;
    p.K = 1;
    auto r = chain_map(mct, ChainMap::A_res, p, x);
    CHECK((r.exact - (1.0 / 1.5) * fejer_map(mct, 1, x)).opnorm() < 1e-12);
}

TEST_CASE("chain map B quadrature and norm control") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(23);
    ChainMapParams p;
    p.u = 0.5;
    p.t = 0.25;
    p.K = 1;
    for (int trial = 0; trial < 50; ++trial) {
        Operator x = random_operator(2, rng, 1.0);
        auto r = chain_map(mc, ChainMap::B_pow, p, x);
        CHECK((r.approx - r.exact).opnorm() <= 1e-6);
        CHECK(r.exact.opnorm() <= b_norm_allowance(p.u, p.t, p.K, x.opnorm()));
    }
    // t >= 1/2 goes through the composition identity
    p.t = 0.8;
    Operator x = random_operator(2, rng, 1.0);
    auto r = chain_map(mc, ChainMap::B_pow, p, x);
    CHECK((r.approx - r.exact).opnorm() <= r.remainder + 1e-6);
    CHECK_THROWS_AS([&] { ChainMapParams q = p; q.t = 0.0; chain_map(mc, ChainMap::B_pow, q, x); }(),
                    ParameterWindowViolation);
}

TEST_CASE("chain map C respects its window") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(29);
    Operator x = random_operator(2, rng);
    ChainMapParams p;
    p.u = 0.1;
    p.K = 1;
    p.beta = c_window_floor(p.u, p.K) + 2.0;
    auto r = chain_map(mc, ChainMap::C_log, p, x);
    CHECK((r.approx - r.exact).opnorm() <= r.remainder + 1e-9);

    ChainMapParams bad = p;
    bad.beta = c_window_floor(p.u, p.K) - 1.0;
    try {
        chain_map(mc, ChainMap::C_log, bad, x);
        FAIL("window violation not raised");
    } catch (const ParameterWindowViolation& e) {
        CHECK(std::string(e.what()).find("4K + 2 ln(24) + 2") != std::string::npos);
    }
}

TEST_CASE("chain map E series") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(31);
    Operator x = random_operator(2, rng);
    ChainMapParams p;
    p.u = 0.5;
    p.t = 0.25;
    p.K = 1;
    p.beta = c_window_floor(p.u, 2 * p.K + 2) + 1.0;
    auto r = chain_map(mc, ChainMap::E_exp, p, x);
    CHECK((r.approx - r.exact).opnorm() <= r.remainder + 1e-8);
    // the exact map is a phase times the fejer cutoff, so GNS norms match
    double ne = norm_phi(mc, r.exact), nf = norm_phi(mc, fejer_map(mc, p.K, x));
    CHECK(ne == Catch::Approx(nf).margin(1e-12));
    p.beta = 1.0;
    CHECK_THROWS_AS(chain_map(mc, ChainMap::E_exp, p, x), ParameterWindowViolation);
}

TEST_CASE("the F-form ladder obeys its transition bounds") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        Operator x = random_operator(2, rng, 1.0), y = random_operator(2, rng, 1.0);
        FormStageParams p;
        p.u = 0.1;
        p.t = 0.25;
        p.K = 1;
        p.L = 2;
        p.beta = c_window_floor(p.u, 2 * p.K + 2) + 1.0;
        for (FormStage st : {FormStage::F_ubt, FormStage::F_ut, FormStage::F_t_finiteKL}) {
            auto r = f_forms(mc, st, p, x, y);
            CHECK(r.neighbor_gap <= r.bound + 1e-12);
        }
    }
    // large beta pins F_ubt to F_ut
    Operator x = random_operator(2, rng, 1.0), y = random_operator(2, rng, 1.0);
    FormStageParams p{0.5, 1e4, 0.5, 1, 1};
    auto big = f_forms(mc, FormStage::F_ubt, p, x, y);
    CHECK(big.neighbor_gap <= big.bound + 1e-12);
    CHECK(big.bound < 2e-3);
    // tiny u pins F_ut to the finite-band F_t
    FormStageParams q{1e-6, 0.0, 0.25, 1, 1};
    auto small = f_forms(mc, FormStage::F_ut, q, x, y);
    CHECK(small.neighbor_gap <= small.bound + 1e-12);
    CHECK(small.bound < 1e-5);
}

TEST_CASE("sigma distance through the forms") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(41);
    auto [lhs, rhs] = sigma_distance_via_forms(
        mc, 0.7, random_operator(2, rng), random_operator(2, rng));
    CHECK(std::abs(lhs - rhs) < 1e-10);
    for (int trial = 0; trial < 100; ++trial) {
        double t = -2.0 + 0.04 * trial;
        Operator x = random_operator(2, rng), y = random_operator(2, rng);
        auto [a, b] = sigma_distance_via_forms(mc, t, x, y);
        CHECK(std::abs(a - b) < 1e-10);
    }
}

TEST_CASE("default sweep passes end to end") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(43);
    Operator x = random_operator(2, rng, 1.0), y = random_operator(2, rng, 1.0);
    auto rows = default_chain_sweep(mc, x, y);
    REQUIRE(rows.size() > 50);
    for (const auto& row : rows) {
        INFO(row.name << " " << row.params << " gap=" << row.gap << " allow=" << row.allowance);
        CHECK(row.pass);
    }
}
