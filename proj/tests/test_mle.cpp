#include <gtest/gtest.h>

#include <random>

#include "zklora/mle.hpp"

using namespace zkl;

namespace {

// Direct Lagrange-basis sum: f(x) = sum_b table[b] prod_i (b_i x_i + (1 - b_i)(1 - x_i)).
template <class F>
F lagrange_oracle(const std::vector<F>& table, const std::vector<F>& x) {
    const int n = static_cast<int>(x.size());
    F acc = F::zero();
    for (std::size_t b = 0; b < table.size(); ++b) {
        F basis = F::one();
        for (int i = 0; i < n; ++i) {
            bool bit = (b >> (n - 1 - i)) & 1;
            basis *= bit ? x[i] : F::one() - x[i];
        }
        acc += table[b] * basis;
    }
    return acc;
}

template <class F>
std::vector<F> rand_vec(std::size_t n, std::mt19937_64& rng) {
    std::vector<F> v(n);
    for (auto& x : v) x = F::random(rng);
    return v;
}

}  // namespace

TEST(Mle, ScalarTensorIsConstant) {
    FMat<Fr> m(1, 1);
    m(0, 0) = Fr(42);
    auto f = DenseMultilinear<Fr>::from_matrix(m);
    EXPECT_EQ(f.num_vars(), 0);
    EXPECT_EQ(f.evaluate({}), Fr(42));
}

TEST(Mle, IdentityTable) {
    FMat<Fr> m = FMat<Fr>::Constant(2, 2, Fr::zero());
    m(0, 0) = Fr::one();
    m(1, 1) = Fr::one();
    auto f = DenseMultilinear<Fr>::from_matrix(m);
    std::vector<Fr> expect{Fr(1), Fr(0), Fr(0), Fr(1)};
    EXPECT_EQ(f.table(), expect);
}

TEST(Mle, BooleanPointsExhaustive2x4) {
    std::mt19937_64 rng(1);
    FMat<Fr> m(2, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = Fr::random(rng);
    auto f = DenseMultilinear<Fr>::from_matrix(m);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) {
            std::vector<Fr> x{Fr(i), Fr((j >> 1) & 1), Fr(j & 1)};  // row bits first
            EXPECT_EQ(f.evaluate(x), m(i, j));
        }
}

TEST(Mle, BooleanPointsUpTo10Vars) {
    std::mt19937_64 rng(2);
    for (int n = 0; n <= 10; ++n) {
        auto f = DenseMultilinear<Fp61>(rand_vec<Fp61>(std::size_t{1} << n, rng));
        for (std::size_t b = 0; b < f.table().size(); ++b) {
            std::vector<Fp61> x(n);
            for (int i = 0; i < n; ++i) x[i] = Fp61((b >> (n - 1 - i)) & 1);
            ASSERT_EQ(f.evaluate(x), f[b]);
        }
    }
}

TEST(Mle, OneVariableClosedForm) {
    std::mt19937_64 rng(3);
    Fr a = Fr::random(rng), b = Fr::random(rng), r = Fr::random(rng);
    DenseMultilinear<Fr> f({a, b});
    EXPECT_EQ(f.evaluate(std::vector<Fr>{Fr(0)}), a);
    EXPECT_EQ(f.evaluate(std::vector<Fr>{r}), a * (Fr::one() - r) + b * r);
}

TEST(Mle, ThreeVarsMatchLagrangeSum) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        auto table = rand_vec<Fr>(8, rng);
        auto x = rand_vec<Fr>(3, rng);
        EXPECT_EQ(DenseMultilinear<Fr>(table).evaluate(x), lagrange_oracle(table, x));
    }
}

TEST(Mle, FoldExamples) {
    Fr a(3), b(5), c(7), d(11);
    EXPECT_EQ(DenseMultilinear<Fr>({a, b}).fold(Fr::one()).table(), std::vector<Fr>{b});
    EXPECT_EQ(DenseMultilinear<Fr>({a, b, c, d}).fold(Fr::zero()).table(), (std::vector<Fr>{a, b}));
    EXPECT_THROW(DenseMultilinear<Fr>({a}).fold(Fr::one()), FoldOnConstant);
}

TEST(Mle, FoldThenEvaluateConsistency) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        int n = 1 + static_cast<int>(rng() % 8);
        DenseMultilinear<Fr> f(rand_vec<Fr>(std::size_t{1} << n, rng));
        auto x = rand_vec<Fr>(n, rng);
        std::vector<Fr> rest(x.begin() + 1, x.end());
        EXPECT_EQ(f.fold(x[0]).evaluate(rest), f.evaluate(x));
    }
}

TEST(Mle, DimensionMismatch) {
    DenseMultilinear<Fr> f({Fr(1), Fr(2)});
    EXPECT_THROW(f.evaluate(std::vector<Fr>{Fr(1), Fr(2)}), DimensionMismatch);
}

TEST(Mle, MultilinearInEachVariable) {
    std::mt19937_64 rng(6);
    const int n = 5;
    DenseMultilinear<Fr> f(rand_vec<Fr>(32, rng));
    for (int i = 0; i < n; ++i) {
        auto x = rand_vec<Fr>(n, rng);
        auto at = [&](Fr v) {
            auto y = x;
            y[i] = v;
            return f.evaluate(y);
        };
        Fr f0 = at(Fr(0)), f1 = at(Fr(1)), f2 = at(Fr(2));
        EXPECT_EQ(f2 - f1, f1 - f0);  // collinear
    }
}

TEST(Mle, EqTableMatchesEqEval) {
    std::mt19937_64 rng(7);
    auto r = rand_vec<Fr>(4, rng);
    auto t = eq_table<Fr>(r);
    for (std::size_t b = 0; b < 16; ++b) {
        std::vector<Fr> bits(4);
        for (int i = 0; i < 4; ++i) bits[i] = Fr((b >> (3 - i)) & 1);
        EXPECT_EQ(t[b], eq_eval<Fr>(r, bits));
    }
}
