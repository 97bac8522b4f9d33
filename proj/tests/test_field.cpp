#include <gtest/gtest.h>

#include <random>

#include "zklora/field.hpp"
#include "zklora/quant.hpp"

using namespace zkl;

namespace {

// Schoolbook oracle: (a * b) mod p on 4-limb integers by shift-and-subtract.
using L4 = std::array<u64, 4>;

bool geq8(const std::array<u64, 8>& a, const std::array<u64, 8>& b) {
    for (int i = 7; i >= 0; --i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return true;
}
void sub8(std::array<u64, 8>& a, const std::array<u64, 8>& b) {
    u64 br = 0;
    for (int i = 0; i < 8; ++i) {
        u128 d = static_cast<u128>(a[i]) - b[i] - br;
        a[i] = static_cast<u64>(d);
        br = static_cast<u64>(d >> 64) & 1;
    }
}
L4 mulmod_oracle(const L4& a, const L4& b, const L4& p) {
    std::array<u64, 8> prod{};
    for (int i = 0; i < 4; ++i) {
        u64 carry = 0;
        for (int j = 0; j < 4; ++j) {
            u128 s = static_cast<u128>(a[i]) * b[j] + prod[i + j] + carry;
            prod[i + j] = static_cast<u64>(s);
            carry = static_cast<u64>(s >> 64);
        }
        prod[i + 4] += carry;
    }
    // reduce: subtract p << k for k from 257 down to 0
    for (int k = 257; k >= 0; --k) {
        std::array<u64, 8> sh{};
        for (int i = 0; i < 4; ++i) {
            int bit = 64 * i + k;
            int li = bit / 64, off = bit % 64;
            if (li < 8) sh[li] |= p[i] << off;
            if (off && li + 1 < 8) sh[li + 1] |= p[i] >> (64 - off);
        }
        if (geq8(prod, sh)) sub8(prod, sh);
    }
    return {prod[0], prod[1], prod[2], prod[3]};
}

std::int64_t euclid_inverse(std::int64_t a, std::int64_t m) {
    i128 t = 0, nt = 1, r = m, nr = a;
    while (nr != 0) {
        i128 q = r / nr;
        i128 tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (t < 0) t += m;
    return static_cast<std::int64_t>(t);
}

template <class F>
void field_axioms(int trials) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < trials; ++i) {
        F a = F::random(rng), b = F::random(rng), c = F::random(rng);
        ASSERT_EQ((a + b) + c, a + (b + c));
        ASSERT_EQ((a * b) * c, a * (b * c));
        ASSERT_EQ(a * (b + c), a * b + a * c);
        ASSERT_EQ(a + b, b + a);
        ASSERT_EQ(a * b, b * a);
        ASSERT_EQ(a - a, F::zero());
        ASSERT_EQ(a * F::one(), a);
    }
}

}  // namespace

TEST(FieldCore, WraparoundBig) {
    Fr pm1 = -Fr::one();
    EXPECT_EQ(pm1 + Fr::one(), Fr::zero());
    Fp61 qm1 = -Fp61::one();
    EXPECT_EQ(qm1 + Fp61::one(), Fp61::zero());
    EXPECT_EQ(qm1.value(), Fp61::kP - 1);
}

TEST(FieldCore, InverseRandom) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        Fr x = Fr::random(rng);
        if (x.is_zero()) continue;
        EXPECT_EQ(x * x.inverse(), Fr::one());
        Fp61 y = Fp61::random(rng);
        if (y.is_zero()) continue;
        EXPECT_EQ(y * y.inverse(), Fp61::one());
    }
}

TEST(FieldCore, InverseOfSevenMatchesEuclid) {
    std::int64_t expect = euclid_inverse(7, static_cast<std::int64_t>(Fp61::kP));
    EXPECT_EQ(Fp61::from_u64(7).inverse().value(), static_cast<u64>(expect));
}

TEST(FieldCore, InverseOfZeroThrows) {
    EXPECT_THROW(Fr::zero().inverse(), InversionOfZero);
    EXPECT_THROW(Fp61::zero().inverse(), InversionOfZero);
    EXPECT_THROW(Fq::zero().inverse(), InversionOfZero);
}

TEST(FieldCore, AxiomsBigField) { field_axioms<Fr>(10000); }
TEST(FieldCore, AxiomsTestField) { field_axioms<Fp61>(10000); }
TEST(FieldCore, AxiomsBaseAndToyFields) {
    field_axioms<Fq>(1000);
    field_axioms<ToyP>(1000);
}

TEST(FieldCore, MontgomeryMatchesSchoolbook) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        Fr a = Fr::random(rng), b = Fr::random(rng);
        EXPECT_EQ((a * b).canonical(), mulmod_oracle(a.canonical(), b.canonical(), Fr::modulus()));
        Fq c = Fq::random(rng), d = Fq::random(rng);
        EXPECT_EQ((c * d).canonical(), mulmod_oracle(c.canonical(), d.canonical(), Fq::modulus()));
    }
}

TEST(FieldCore, BytesRoundTripAndCanonicalCheck) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        Fr a = Fr::random(rng);
        std::uint8_t b[32];
        a.to_bytes(b);
        Fr back;
        ASSERT_TRUE(Fr::from_bytes(b, back));
        EXPECT_EQ(a, back);
    }
    std::uint8_t ones[32];
    std::fill(ones, ones + 32, 0xff);
    Fr junk;
    EXPECT_FALSE(Fr::from_bytes(ones, junk));
    std::uint8_t pbytes[8];
    for (int i = 0; i < 8; ++i) pbytes[i] = static_cast<std::uint8_t>(Fp61::kP >> (8 * i));
    Fp61 j2;
    EXPECT_FALSE(Fp61::from_bytes(pbytes, j2));
}

TEST(FieldCore, WideReductionMatchesOracle) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
        std::array<std::uint8_t, 64> w;
        for (auto& x : w) x = static_cast<std::uint8_t>(rng());
        L4 lo{}, hi{};
        for (int l = 0; l < 4; ++l)
            for (int b = 0; b < 8; ++b) {
                lo[l] |= static_cast<u64>(w[8 * l + b]) << (8 * b);
                hi[l] |= static_cast<u64>(w[32 + 8 * l + b]) << (8 * b);
            }
        // hi * 2^256 + lo = hi * (2^256 mod p) + lo
        L4 p = Fr::modulus();
        L4 r256 = {Bn254FrParams::R[0], Bn254FrParams::R[1], Bn254FrParams::R[2], Bn254FrParams::R[3]};
        L4 one{1, 0, 0, 0};
        L4 a = mulmod_oracle(hi, r256, p);
        L4 b = mulmod_oracle(lo, one, p);
        Fr expect = Fr::from_canonical(a) + Fr::from_canonical(b);
        EXPECT_EQ(Fr::from_wide(w.data()), expect);
    }
}

TEST(FieldCore, SignedLift) {
    EXPECT_EQ(Fr::from_i64(-5).to_i64(), -5);
    EXPECT_EQ(Fr::from_i64(INT64_MIN).to_i64(), INT64_MIN);
    EXPECT_EQ(Fp61::from_i64(-123456789).to_i64(), -123456789);
    i128 big = static_cast<i128>(1) << 100;
    EXPECT_EQ(Fr::from_i128(-big).to_i128(), -big);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        std::int64_t a = static_cast<std::int64_t>(rng() >> 4) - (std::int64_t{1} << 59);
        std::int64_t b = static_cast<std::int64_t>(rng() >> 4) - (std::int64_t{1} << 59);
        EXPECT_EQ(a < b, Fr::from_i64(a).to_i64() < Fr::from_i64(b).to_i64());
        EXPECT_EQ(a < b, Fp61::from_i64(a).to_i64() < Fp61::from_i64(b).to_i64());
    }
}

TEST(FieldCore, EigenMatrixProduct) {
    FMat<Fr> a(2, 2), b(2, 2);
    a << Fr(1), Fr(2), Fr(3), Fr(4);
    b << Fr(5), Fr(6), Fr(7), Fr(8);
    FMat<Fr> c = a * b;
    EXPECT_EQ(c(0, 0), Fr(19));
    EXPECT_EQ(c(0, 1), Fr(22));
    EXPECT_EQ(c(1, 0), Fr(43));
    EXPECT_EQ(c(1, 1), Fr(50));
}

TEST(Quantize, Examples) {
    QuantParams q;
    EXPECT_EQ(quantize_real<Fr>(1.0, q), Fr::from_u64(65536));
    EXPECT_EQ(quantize_real<Fr>(-1.5, q), Fr::zero() - Fr::from_u64(98304));
    EXPECT_EQ(dequantize(Fr::zero(), q), 0.0);
    EXPECT_EQ(dequantize(Fr::from_u64(65536), q), 1.0);
    EXPECT_EQ(dequantize(Fr::zero() - Fr::from_u64(32768), q), -0.5);
    EXPECT_EQ(dequantize(Fp61::zero() - Fp61::from_u64(32768), q), -0.5);
}

TEST(Quantize, RoundTripWithinHalfUlp) {
    QuantParams q;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    for (int i = 0; i < 1000; ++i) {
        double x = u(rng);
        EXPECT_LE(std::fabs(dequantize(quantize_real<Fr>(x, q), q) - x), std::ldexp(1.0, -17));
        EXPECT_LE(std::fabs(dequantize(quantize_real<Fp61>(x, q), q) - x), std::ldexp(1.0, -17));
    }
}

TEST(Quantize, RoundsHalfAwayFromZero) {
    QuantParams q;
    EXPECT_EQ(quantize_real<Fr>(std::ldexp(1.0, -17), q), Fr::from_u64(1));
    EXPECT_EQ(quantize_real<Fr>(-std::ldexp(1.0, -17), q), -Fr::from_u64(1));
}

TEST(Quantize, OutOfRange) {
    QuantParams q;
    EXPECT_THROW(quantize_real<Fr>(70000.0, q), OutOfRange);
    EXPECT_THROW(quantize_real<Fr>(std::nan(""), q), OutOfRange);
}

TEST(Quantize, TensorPadding) {
    QuantParams q;
    Eigen::MatrixXd x(3, 5);
    x.setRandom();
    auto t = QuantizedTensor<Fr>::from_reals(x, q);
    EXPECT_EQ(t.padded_rows(), 4);
    EXPECT_EQ(t.padded_cols(), 8);
    EXPECT_TRUE(t.well_formed());
    EXPECT_LE((t.to_reals() - x).cwiseAbs().maxCoeff(), std::ldexp(1.0, -17));
    t.data(3, 7) = Fr::one();
    EXPECT_FALSE(t.well_formed());
}
