#include <gtest/gtest.h>

#include <random>
#include <set>

#include "zklora/hyrax.hpp"

using namespace zkl;

namespace {

std::vector<std::uint8_t> seed_bytes(const char* s) { return std::vector<std::uint8_t>(s, s + std::strlen(s)); }

template <class F>
std::vector<F> rand_vec(std::size_t n, std::mt19937_64& rng) {
    std::vector<F> v(n);
    for (auto& x : v) x = F::random(rng);
    return v;
}

const CommitmentKey<Bn254>& big_key() {
    static CommitmentKey<Bn254> k = CommitmentKey<Bn254>::keygen(16, seed_bytes("test-key"));
    return k;
}

}  // namespace

TEST(Transcript, Determinism) {
    Transcript a("t"), b("t");
    a.append("x", seed_bytes("hello"));
    b.append("x", seed_bytes("hello"));
    EXPECT_EQ(a.challenge<Fr>("c"), b.challenge<Fr>("c"));
    EXPECT_EQ(a.challenge<Fr>("c"), b.challenge<Fr>("c"));
}

TEST(Transcript, PrefixSensitivity) {
    Transcript a("t"), b("t");
    a.append("com", seed_bytes("one"));
    b.append("com", seed_bytes("two"));
    EXPECT_NE(a.challenge<Fr>("c"), b.challenge<Fr>("c"));
    Transcript c("t"), d("u");
    EXPECT_NE(c.challenge<Fr>("c"), d.challenge<Fr>("c"));
}

TEST(Transcript, ForkIsIndependentOfSiblings) {
    Transcript t("t");
    Transcript f0 = t.fork("g", 0), f1 = t.fork("g", 1), f0b = t.fork("g", 0);
    EXPECT_EQ(f0.challenge<Fr>("c"), f0b.challenge<Fr>("c"));
    EXPECT_NE(t.fork("g", 0).challenge<Fr>("c"), f1.challenge<Fr>("c"));
}

// Frozen challenge bytes; a change here means bundles stop verifying across versions.
TEST(Transcript, GoldenChallengeStream) {
    Transcript t("golden");
    t.append("msg", seed_bytes("zklora"));
    t.append_u64("n", 42);
    EXPECT_EQ(t.challenge<Fr>("a").to_hex(), "2e2fc30cea75386373758ea8f218f2dcf32e901891945338b3a34cffce17527b");
    EXPECT_EQ(t.challenge<Fp61>("b").to_hex(), "06b7f49c4aef5ccf");
}

TEST(Group, GeneratorsOnCurveAndDistinct) {
    const auto& k = big_key();
    std::set<std::array<std::uint8_t, 32>> seen;
    for (const auto& g : k.G) {
        EXPECT_TRUE(g.on_curve());
        seen.insert(encode_point<Bn254>(g));
    }
    seen.insert(encode_point<Bn254>(k.H));
    EXPECT_EQ(seen.size(), k.G.size() + 1);
}

TEST(Group, GroupOrderIsScalarModulus) {
    // r * P = O for a hashed point P, checked with scalar r - 1 plus one more addition.
    const auto& k = big_key();
    G1 p = G1::from_affine(k.G[3]);
    G1 q = scalar_mul<Bn254>(p, -Fr::one());
    q += p;
    EXPECT_TRUE(q.is_identity());
}

TEST(Group, EncodingRoundTrip) {
    const auto& k = big_key();
    for (int i = 0; i < 8; ++i) {
        G1Affine a = k.G[i], b;
        auto bytes = encode_point<Bn254>(a);
        ASSERT_TRUE(G1Affine::from_bytes(bytes.data(), b));
        EXPECT_EQ(a, b);
        auto nb = encode_point<Bn254>(-a);
        ASSERT_TRUE(G1Affine::from_bytes(nb.data(), b));
        EXPECT_EQ(-a, b);
    }
    G1Affine inf;
    auto ib = encode_point<Bn254>(inf);
    G1Affine back;
    ASSERT_TRUE(G1Affine::from_bytes(ib.data(), back));
    EXPECT_TRUE(back.is_identity());
}

TEST(Group, MsmMatchesNaive) {
    std::mt19937_64 rng(2);
    const auto& k = big_key();
    for (std::size_t n : {1u, 2u, 3u, 7u, 33u, 200u}) {
        auto s = rand_vec<Fr>(n, rng);
        if (n > 2) {
            s[1] = Fr(-5);
            s[2] = Fr::zero();
        }
        G1 naive = G1::identity();
        for (std::size_t i = 0; i < n; ++i) naive += scalar_mul<Bn254>(G1::from_affine(k.G[i]), s[i]);
        G1 fast = msm<Bn254>(std::span<const G1Affine>(k.G.data(), n), s);
        EXPECT_TRUE(fast.equals(naive)) << n;
    }
}

TEST(Group, MsmRepeatedPointsSmallScalars) {
    const auto& k = big_key();
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 3 + rng() % 20;
        std::vector<G1Affine> pts(n);
        std::vector<Fr> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            pts[i] = k.G[rng() % 3];
            s[i] = Fr::from_i64(static_cast<std::int64_t>(rng() % 17) - 8);
        }
        G1 naive = G1::identity();
        for (std::size_t i = 0; i < n; ++i) naive += scalar_mul<Bn254>(G1::from_affine(pts[i]), s[i]);
        EXPECT_TRUE(msm<Bn254>(pts, s).equals(naive)) << trial;
    }
    std::vector<G1Affine> pts{k.G[0], k.G[0], k.G[1]};
    std::vector<Fr> s{Fr(6), Fr(6), Fr(1)};
    G1 expect = scalar_mul<Bn254>(G1::from_affine(k.G[0]), Fr(12)) + G1::from_affine(k.G[1]);
    EXPECT_TRUE(msm<Bn254>(pts, s).equals(expect));
}

TEST(Group, FixedBaseMatchesNaive) {
    std::mt19937_64 rng(3);
    const auto& k = big_key();
    for (int i = 0; i < 10; ++i) {
        Fr s = Fr::random(rng);
        EXPECT_TRUE(k.H_table.mul(s).equals(scalar_mul<Bn254>(G1::from_affine(k.H), s)));
    }
    EXPECT_TRUE(k.H_table.mul(Fr(-1)).equals(-G1::from_affine(k.H)));
}

TEST(Group, ToyGroupOrder) {
    std::vector<std::uint8_t> msg{1, 2, 3};
    ToyElem g = ToyElem::hash_to_group(msg);
    EXPECT_FALSE(g.is_identity());
    EXPECT_TRUE(scalar_mul<Toy61>(g, -Fp61::one()).equals(-g));
    std::array<std::uint8_t, 16> b;
    g.to_bytes(b.data());
    ToyElem back;
    ASSERT_TRUE(ToyElem::from_bytes(b.data(), back));
    EXPECT_EQ(back, g);
}

TEST(Commit, KeygenDeterministic) {
    auto a = CommitmentKey<Bn254>::keygen(6, seed_bytes("s1"));
    auto b = CommitmentKey<Bn254>::keygen(6, seed_bytes("s1"));
    auto c = CommitmentKey<Bn254>::keygen(6, seed_bytes("s2"));
    ASSERT_EQ(a.G.size(), 8u);
    for (std::size_t j = 0; j < a.G.size(); ++j) {
        EXPECT_EQ(a.G[j], b.G[j]);
        EXPECT_FALSE(a.G[j] == c.G[j]);
    }
    EXPECT_EQ(a.H, b.H);
}

TEST(Commit, ZeroTableZeroBlindIsIdentity) {
    std::vector<Fr> t(16, Fr::zero());
    auto c = commit<Bn254>(big_key(), t, {});
    for (const auto& p : c.points()) EXPECT_TRUE(p.is_identity());
}

TEST(Commit, BlindingRandomizes) {
    std::mt19937_64 rng(4);
    auto t = rand_vec<Fr>(16, rng);
    auto b1 = random_blinds<Bn254>(4, rng), b2 = random_blinds<Bn254>(4, rng);
    auto c1 = commit<Bn254>(big_key(), t, b1), c2 = commit<Bn254>(big_key(), t, b2), c3 = commit<Bn254>(big_key(), t, b1);
    EXPECT_FALSE(c1 == c2);
    EXPECT_TRUE(c1 == c3);
}

TEST(Commit, TooLargeForKey) {
    auto k = CommitmentKey<Bn254>::keygen(4, seed_bytes("small"));
    std::vector<Fr> t(64, Fr::one());
    EXPECT_THROW(commit<Bn254>(k, t, {}), KeyTooSmall);
}

TEST(Commit, ToyBindingExhaustive) {
    // 4-entry commitment, binding-only; search all messages with entries in [0, 16) for a collision.
    auto k = CommitmentKey<Toy61>::keygen(2, seed_bytes("toy"));
    std::vector<Fp61> target{Fp61(3), Fp61(1), Fp61(4), Fp61(1)};
    auto c = commit<Toy61>(k, target, {});
    int matches = 0;
    for (int v = 0; v < 16 * 16 * 16 * 16; ++v) {
        std::vector<Fp61> m{Fp61(v & 15), Fp61((v >> 4) & 15), Fp61((v >> 8) & 15), Fp61((v >> 12) & 15)};
        if (commit<Toy61>(k, m, {}) == c) ++matches;
    }
    EXPECT_EQ(matches, 1);
}

template <class B>
void opening_round_trip(const CommitmentKey<B>& key, int n, std::mt19937_64& rng, bool& ok) {
    using F = typename B::F;
    auto t = rand_vec<F>(std::size_t{1} << n, rng);
    auto bl = random_blinds<B>(n, rng);
    auto c = commit<B>(key, t, bl);
    auto x = rand_vec<F>(n, rng);
    Transcript tp("open"), tv("open");
    Drbg drbg("open", rng());
    auto pf = open<B>(key, t, bl, x, tp, drbg);
    ok = pf.y == mle_eval<F>(t, x);
    MsmAccumulator<B> acc(key);
    ok = ok && verify_opening<B>(key, c, x, pf, tv, acc, "t") && acc.finalize();
}

TEST(Commit, OpeningCompletenessAllSizes) {
    std::mt19937_64 rng(5);
    for (int n = 0; n <= 16; ++n) {
        int trials = n <= 8 ? 100 : (n <= 12 ? 10 : 1);
        for (int t = 0; t < trials; ++t) {
            bool ok = false;
            opening_round_trip<Bn254>(big_key(), n, rng, ok);
            ASSERT_TRUE(ok) << "n=" << n;
        }
    }
}

TEST(Commit, ConstantPolynomial) {
    std::vector<Fr> t(64, Fr(9));
    std::mt19937_64 rng(6);
    auto bl = random_blinds<Bn254>(6, rng);
    auto c = commit<Bn254>(big_key(), t, bl);
    auto x = rand_vec<Fr>(6, rng);
    Transcript tp("c"), tv("c");
    Drbg d("c", 1);
    auto pf = open<Bn254>(big_key(), t, bl, x, tp, d);
    EXPECT_EQ(pf.y, Fr(9));
    MsmAccumulator<Bn254> acc(big_key());
    EXPECT_TRUE(verify_opening<Bn254>(big_key(), c, x, pf, tv, acc, "c") && acc.finalize());
}

TEST(Commit, Mutations) {
    std::mt19937_64 rng(7);
    const int n = 6;
    int rejected = 0, total = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto t = rand_vec<Fr>(64, rng);
        auto bl = random_blinds<Bn254>(n, rng);
        auto c = commit<Bn254>(big_key(), t, bl);
        auto x = rand_vec<Fr>(n, rng);
        Transcript tp("m");
        Drbg d("m", trial);
        auto pf = open<Bn254>(big_key(), t, bl, x, tp, d);
        auto check = [&](const Commitment<Bn254>& cc, const std::vector<Fr>& xx, const OpeningProof<Bn254>& p) {
            Transcript tv("m");
            MsmAccumulator<Bn254> acc(big_key());
            return verify_opening<Bn254>(big_key(), cc, xx, p, tv, acc, "m") && acc.finalize();
        };
        // point binding
        auto x2 = x;
        x2[trial % n] += Fr::one();
        ++total;
        rejected += !check(c, x2, pf);
        if (trial < 50) {
            auto p2 = pf;
            p2.y += Fr::one();
            ++total;
            rejected += !check(c, x, p2);
            auto c2 = commit<Bn254>(big_key(), t, bl);
            auto pts = c2.points();
            pts[trial % pts.size()] = big_key().G[0];
            c2.set_points(pts);
            ++total;
            rejected += !check(c2, x, pf);
        }
    }
    EXPECT_EQ(rejected, total);
}

TEST(Commit, LinearCombinationOpening) {
    std::mt19937_64 rng(8);
    const int n = 5;
    auto a = rand_vec<Fr>(32, rng), b = rand_vec<Fr>(32, rng);
    auto ba = random_blinds<Bn254>(n, rng), bb = random_blinds<Bn254>(n, rng);
    auto ca = commit<Bn254>(big_key(), a, ba), cb = commit<Bn254>(big_key(), b, bb);
    Fr k1(3), k2(-7);
    std::vector<Fr> comb(32), cbl(ba.size());
    for (int i = 0; i < 32; ++i) comb[i] = k1 * a[i] + k2 * b[i];
    for (std::size_t i = 0; i < ba.size(); ++i) cbl[i] = k1 * ba[i] + k2 * bb[i];
    auto x = rand_vec<Fr>(n, rng);
    Transcript tp("l"), tv("l");
    Drbg d("l", 2);
    auto pf = open<Bn254>(big_key(), comb, cbl, x, tp, d);
    std::vector<CommitTerm<Bn254>> terms{{k1, &ca}, {k2, &cb}};
    MsmAccumulator<Bn254> acc(big_key());
    EXPECT_TRUE(verify_opening<Bn254>(big_key(), std::span<const CommitTerm<Bn254>>(terms), x, pf, tv, acc, "l"));
    EXPECT_TRUE(acc.finalize());
}

TEST(Commit, AccumulatorLocatesFailure) {
    std::mt19937_64 rng(9);
    MsmAccumulator<Bn254> acc(big_key());
    std::vector<std::pair<Commitment<Bn254>, OpeningProof<Bn254>>> items;
    std::vector<std::vector<Fr>> xs;
    for (int i = 0; i < 3; ++i) {
        auto t = rand_vec<Fr>(16, rng);
        auto bl = random_blinds<Bn254>(4, rng);
        auto c = commit<Bn254>(big_key(), t, bl);
        auto x = rand_vec<Fr>(4, rng);
        Transcript tp("a");
        Drbg d("a", i);
        auto pf = open<Bn254>(big_key(), t, bl, x, tp, d);
        if (i == 1) pf.z_tau += Fr::one();
        Transcript tv("a");
        ASSERT_TRUE(verify_opening<Bn254>(big_key(), c, x, pf, tv, acc, "item" + std::to_string(i)));
    }
    std::string where;
    EXPECT_FALSE(acc.finalize(&where));
    EXPECT_EQ(where, "item1");
}
