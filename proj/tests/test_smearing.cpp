#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "wstar/smearing.hpp"

using namespace wstar;
using wstar::testing::model_23;
using wstar::testing::random_operator;
using wstar::testing::tracial;

namespace {
double op_dist(const Operator& a, const Operator& b) { return Operator(a.mat() - b.mat()).opnorm(); }
}

TEST_CASE("hat functions") {
    CHECK(fejer_hat(1.0, 0.0, 0.0) == 1.0);
    CHECK(fejer_hat(1.0, 0.0, 0.5) == 0.5);
    CHECK(fejer_hat(1.0, 0.0, 1.0) == 0.0);
    CHECK(fejer_hat(2.0, 3.0, 3.0) == 1.0);
    CHECK(fejer_hat(2.0, 3.0, 4.0) == 0.5);
    CHECK(fejer_hat(2.0, 3.0, 6.0) == 0.0);

    CHECK(dlvp_hat(2.0, 0.0) == 1.0);
    CHECK(dlvp_hat(2.0, 2.0) == 1.0);
    CHECK(dlvp_hat(2.0, 2.5) == 0.5);
    CHECK(dlvp_hat(2.0, 3.0) == 0.0);
    CHECK(dlvp_hat(2.0, -2.5) == 0.5);
    // H_K = (K+1) F_{K+1} - K F_K pointwise
    for (double t = -4.0; t <= 4.0; t += 0.1)
        CHECK(dlvp_hat(2.0, t) ==
              Catch::Approx(3.0 * fejer_hat(3.0, 0.0, t) - 2.0 * fejer_hat(2.0, 0.0, t)).margin(1e-14));
}

TEST_CASE("fejer map examples") {
    auto m = model_23();
    ModularCalculus mc(m);
    Operator e12 = Operator::unit(2, 0, 1);
    // spectrum of e12 is {ln 2}; F_1 scales by 1 - ln 2
    CHECK(op_dist(fejer_map(mc, 1.0, e12), (1.0 - std::log(2.0)) * e12) < 1e-14);
    // band below ln 2 kills it
    CHECK(fejer_map(mc, 0.5, e12).opnorm() < 1e-14);
    // far translate also kills it
    CHECK(fejer_map(mc, 1.0, 5.0, e12).opnorm() < 1e-14);
    // translate centered on the point restores it
    CHECK(op_dist(fejer_map(mc, 1.0, std::log(2.0), e12), e12) < 1e-14);

    CHECK_THROWS_AS(fejer_map(mc, 0.0, e12), NonPositiveBandwidth);
    CHECK_THROWS_AS(fejer_map(mc, -1.0, e12), NonPositiveBandwidth);
}

TEST_CASE("dlvp map is the identity inside the band") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(31);
    Operator x = random_operator(2, rng);
    // spectral diameter is ln 2 < 1, so H_1 = id on everything
    CHECK(op_dist(dlvp_map(mc, 1, x), x) < 1e-13);
    // H_{K+L} after F_K changes nothing
    for (int K : {1, 2, 3}) {
        Operator fx = fejer_map(mc, K, x);
        CHECK(op_dist(dlvp_map(mc, K + 1, fx), fx) < 1e-13);
    }
    CHECK_THROWS_AS(dlvp_map(mc, -1, x), BadRange);
}

TEST_CASE("big smeared product matches the H composition") {
    auto m = WStarModel::from_eigenvalues({0.5, 0.3, 0.2});
    ModularCalculus mc(m);
    std::mt19937_64 rng(37);
    for (int rep = 0; rep < 10; ++rep) {
        Operator a = random_operator(3, rng), b = random_operator(3, rng);
        for (int K : {1, 2})
            for (int L : {1, 3}) {
                Operator lhs = big_smeared_product(mc, K, L, a, b);
                Operator rhs = dlvp_map(mc, K + 1, a) * dlvp_map(mc, L + 1, b);
                CHECK(op_dist(lhs, rhs) < 1e-11);
            }
    }
}

TEST_CASE("big smeared product recovers plain products of band-limited inputs") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(41);
    // all spectra fit in [-1,1], so M_{(1,1)}(a,b) = a b
    for (int rep = 0; rep < 20; ++rep) {
        Operator a = random_operator(2, rng), b = random_operator(2, rng);
        CHECK(op_dist(big_smeared_product(mc, 1, 1, a, b), a * b) < 1e-12);
    }
}

TEST_CASE("smeared polynomial equals the direct expansion") {
    auto m = model_23();
    ModularCalculus mc(m);
    std::mt19937_64 rng(43);
    // p(z) = 2 z z* z - i z* + 3
    StarPolynomial p{
        {Complex(2.0, 0.0), {false, true, false}},
        {Complex(0.0, -1.0), {true}},
        {Complex(3.0, 0.0), {}},
    };
    std::vector<double> lambda{0.25, 0.75};
    std::vector<int> bands{2, 3};
    for (int rep = 0; rep < 10; ++rep) {
        Operator x = random_operator(2, rng);
        Operator lhs = smeared_polynomial(mc, p, lambda, bands, x);
        Operator rhs = polynomial_direct(mc, p, lambda, bands, x);
        CHECK(op_dist(lhs, rhs) < 1e-10 * std::pow(x.opnorm() + 1.0, 3));
    }

    // degree-4 word exercises the nesting loop twice
    StarPolynomial q{{Complex(1.0, 0.5), {false, false, true, false}}};
    Operator x = random_operator(2, rng, 1.0);
    CHECK(op_dist(smeared_polynomial(mc, q, lambda, bands, x),
                  polynomial_direct(mc, q, lambda, bands, x)) < 1e-10);

    CHECK_THROWS_AS(smeared_polynomial(mc, p, {0.5}, bands, x), LengthMismatch);
    CHECK_THROWS_AS(smeared_polynomial(mc, p, {0.5, 0.2}, bands, x), BadWeights);
    CHECK_THROWS_AS(smeared_polynomial(mc, p, {1.5, -0.5}, bands, x), BadWeights);
}

TEST_CASE("spectral membership test") {
    auto m = model_23();
    ModularCalculus mc(m);
    Operator e12 = Operator::unit(2, 0, 1);
    Operator e11 = Operator::unit(2, 0, 0);

    CHECK(spectral_membership_test(mc, 1, e12, 8));
    CHECK_FALSE(spectral_membership_test(mc, 0, e12, 8));
    CHECK(spectral_membership_test(mc, 0, e11, 8));
    CHECK(spectral_membership_test(mc, 0, m.identity(), 8));
    CHECK(spectral_membership_test(mc, 0, m.zero(), 8));
    CHECK(spectral_membership_test(mc, 2, e12 + e11, 8));

    // agreement with the direct truncation characterization
    std::mt19937_64 rng(47);
    auto m3 = WStarModel::from_eigenvalues({0.6, 0.25, 0.15});
    ModularCalculus mc3(m3);
    for (int rep = 0; rep < 20; ++rep) {
        Operator x = random_operator(3, rng);
        for (int K : {0, 1, 2}) {
            bool direct = op_dist(mc3.spectral_truncate(K, x), x) < 1e-10 * x.opnorm();
            CHECK(spectral_membership_test(mc3, K, x, 10) == direct);
        }
    }

    CHECK_THROWS_AS(spectral_membership_test(mc, 2, e12, 1), BadRange);
}
