#include <gtest/gtest.h>

#include "sumcheck_harness.hpp"

using namespace zkl;
using namespace zkl::testing;

TEST(Sumcheck, ProductOfCoordinates) {
    // f(x1, x2) = x1 * x2 as a product of the two coordinate functions
    std::vector<std::vector<Fr>> f{{Fr(0), Fr(0), Fr(1), Fr(1)}, {Fr(0), Fr(1), Fr(0), Fr(1)}};
    ShapeConsts<Fr> k;
    EXPECT_EQ(direct_sum<Fr>(Shape::ProductOfTwo, f, k), Fr(1));
    Transcript tp("pc"), tv("pc");
    SumcheckOutput<Fr> out;
    auto pf = prove_sumcheck<Fr>(Shape::ProductOfTwo, f, k, Fr(1), tp, out);
    ASSERT_EQ(pf.rounds.size(), 2u);
    std::vector<Fr> point;
    Fr fin;
    ASSERT_TRUE(verify_sumcheck_rounds<Fr>(2, 2, Fr(1), pf, tv, point, fin));
    EXPECT_EQ(point, out.point);
    EXPECT_EQ(fin, point[0] * point[1]);
}

TEST(Sumcheck, ZeroFactorGivesZeroRounds) {
    std::mt19937_64 rng(1);
    std::vector<std::vector<Fr>> f{std::vector<Fr>(8, Fr::zero()), rand_vec<Fr>(8, rng)};
    Transcript tp("z");
    SumcheckOutput<Fr> out;
    auto pf = prove_sumcheck<Fr>(Shape::ProductOfTwo, f, {}, Fr::zero(), tp, out);
    for (const auto& g : pf.rounds)
        for (const auto& e : g) EXPECT_TRUE(e.is_zero());
}

TEST(Sumcheck, RandomThreeVariableClaim) {
    std::mt19937_64 rng(2);
    for (Shape s : {Shape::ProductOfTwo, Shape::Eq4, Shape::Eq7}) {
        auto c = random_claim<Bn254>(s, 3, rng);
        auto pf = prove_claim<Bn254>(c, "r3", 1);
        EXPECT_EQ(pf.sc.rounds.size(), 3u);
        EXPECT_TRUE(verify_claim<Bn254>(c, pf, "r3"));
    }
}

TEST(Sumcheck, RoundConsistencyAndInterpolation) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + static_cast<int>(rng() % 8);
        std::vector<std::vector<Fr>> f;
        for (int q = 0; q < 7; ++q) f.push_back(rand_vec<Fr>(std::size_t{1} << n, rng));
        ShapeConsts<Fr> k{Fr::random(rng), Fr::random(rng), Fr::random(rng), Fr::random(rng)};
        Fr claim = direct_sum<Fr>(Shape::Eq7, f, k);
        Transcript tp("rc");
        SumcheckOutput<Fr> out;
        auto pf = prove_sumcheck<Fr>(Shape::Eq7, f, k, claim, tp, out);
        Fr running = claim;
        for (std::size_t i = 0; i < pf.rounds.size(); ++i) {
            ASSERT_EQ(pf.rounds[i][0] + pf.rounds[i][1], running);
            running = interpolate_at<Fr>(pf.rounds[i], out.point[i]);
        }
        // reduced claim equals the rule applied to the multilinear evaluations
        std::vector<Fr> vals;
        for (const auto& t : f) vals.push_back(mle_eval<Fr>(t, out.point));
        EXPECT_EQ(running, combine<Fr>(Shape::Eq7, vals, k));
        EXPECT_EQ(out.claim, running);
    }
}

TEST(Sumcheck, InterpolationMatchesPolynomial) {
    std::mt19937_64 rng(4);
    for (int d = 1; d <= 3; ++d) {
        auto coef = rand_vec<Fp61>(d + 1, rng);
        auto eval = [&](Fp61 x) {
            Fp61 acc = Fp61::zero();
            for (int i = d; i >= 0; --i) acc = acc * x + coef[i];
            return acc;
        };
        std::vector<Fp61> ev;
        for (int i = 0; i <= d; ++i) ev.push_back(eval(Fp61::from_u64(i)));
        Fp61 r = Fp61::random(rng);
        EXPECT_EQ(interpolate_at<Fp61>(ev, r), eval(r));
    }
}

TEST(Sumcheck, DegreeOverflow) {
    std::vector<std::vector<Fr>> f(4, std::vector<Fr>(4, Fr(1)));
    Transcript tp("d");
    SumcheckOutput<Fr> out;
    EXPECT_THROW(prove_sumcheck<Fr>(Shape::Eq4, f, {}, Fr(0), tp, out, 2), DegreeOverflow);
}

TEST(Sumcheck, ConstantClaimHasNoRounds) {
    std::mt19937_64 rng(5);
    auto c = random_claim<Bn254>(Shape::Eq4, 0, rng);
    auto pf = prove_claim<Bn254>(c, "n0", 2);
    EXPECT_TRUE(pf.sc.rounds.empty());
    EXPECT_TRUE(verify_claim<Bn254>(c, pf, "n0"));
    c.sum += Fr(1);
    EXPECT_FALSE(verify_claim<Bn254>(c, pf, "n0"));
}

TEST(Sumcheck, RoundTwoPerturbationRejected) {
    std::mt19937_64 rng(6);
    auto c = random_claim<Bn254>(Shape::Eq4, 5, rng);
    auto pf = prove_claim<Bn254>(c, "m2", 3);
    int rejected = 0;
    for (int t = 0; t < 100; ++t) {
        auto bad = pf;
        bad.sc.rounds[1][rng() % 4] += Fr::random(rng);
        rejected += !verify_claim<Bn254>(c, bad, "m2");
    }
    EXPECT_EQ(rejected, 100);
}

TEST(Sumcheck, ClaimOffByOneRejected) {
    std::mt19937_64 rng(7);
    auto c = random_claim<Bn254>(Shape::ProductOfTwo, 4, rng);
    auto pf = prove_claim<Bn254>(c, "o1", 4);
    ASSERT_TRUE(verify_claim<Bn254>(c, pf, "o1"));
    c.sum += Fr(1);
    EXPECT_FALSE(verify_claim<Bn254>(c, pf, "o1"));
}

TEST(Sumcheck, CompletenessAndMutationsSmallVars) {
    std::mt19937_64 rng(8);
    const Shape shapes[] = {Shape::ProductOfTwo, Shape::Eq4, Shape::Eq7};
    int accepted = 0, rejected = 0;
    for (int t = 0; t < 60; ++t) {
        Shape s = shapes[t % 3];
        int n = static_cast<int>(rng() % 7);
        auto c = random_claim<Bn254>(s, n, rng);
        auto pf = prove_claim<Bn254>(c, "cm", t);
        accepted += verify_claim<Bn254>(c, pf, "cm");
        mutate<Bn254>(c, pf, t, "cm", rng);
        rejected += !verify_claim<Bn254>(c, pf, "cm");
    }
    EXPECT_EQ(accepted, 60);
    EXPECT_EQ(rejected, 60);
}

TEST(Sumcheck, ToyBackendRoundTrip) {
    std::mt19937_64 rng(9);
    for (Shape s : {Shape::ProductOfTwo, Shape::Eq4, Shape::Eq7}) {
        auto c = random_claim<Toy61>(s, 6, rng);
        auto pf = prove_claim<Toy61>(c, "toy", 5);
        EXPECT_TRUE(verify_claim<Toy61>(c, pf, "toy"));
    }
}
