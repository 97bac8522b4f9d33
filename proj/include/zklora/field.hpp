#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace zkl {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i128 = __int128;

struct InversionOfZero : std::domain_error {
    InversionOfZero() : std::domain_error("inverse of zero") {}
};

// Montgomery-form prime field with P::N 64-bit limbs. Requires p < 2^(64N - 1).
template <class P>
class MontField {
public:
    static constexpr int kLimbs = P::N;
    static constexpr std::size_t kBytes = 8 * P::N;
    using Limbs = std::array<u64, P::N>;

    constexpr MontField() : v_{} {}
    explicit MontField(int x) { *this = from_i64(x); }

    static MontField zero() { return MontField(); }
    static MontField one() { return from_mont(P::R); }

    static MontField from_u64(u64 x) {
        Limbs a{};
        a[0] = x;
        return from_canonical(a);
    }
    static MontField from_i64(std::int64_t x) {
        if (x >= 0) return from_u64(static_cast<u64>(x));
        return -from_u64(static_cast<u64>(-(x + 1)) + 1);
    }
    static MontField from_i128(i128 x) {
        bool neg = x < 0;
        u128 m = neg ? static_cast<u128>(-(x + 1)) + 1 : static_cast<u128>(x);
        Limbs a{};
        a[0] = static_cast<u64>(m);
        if constexpr (P::N > 1) a[1] = static_cast<u64>(m >> 64);
        MontField r = from_canonical(reduce_once(a));
        return neg ? -r : r;
    }
    // a must be < 2^(64N); reduced with one Montgomery multiplication by R^2.
    static MontField from_canonical(const Limbs& a) {
        MontField r;
        mont_mul(r.v_.data(), a.data(), P::R2);
        return r;
    }
    static MontField from_mont(const u64* m) {
        MontField r;
        for (int i = 0; i < P::N; ++i) r.v_[i] = m[i];
        return r;
    }

    Limbs canonical() const {
        Limbs one{};
        one[0] = 1;
        Limbs out;
        mont_mul(out.data(), v_.data(), one.data());
        return out;
    }
    const Limbs& mont() const { return v_; }

    bool is_zero() const {
        for (u64 x : v_)
            if (x) return false;
        return true;
    }
    friend bool operator==(const MontField& a, const MontField& b) { return a.v_ == b.v_; }
    friend bool operator!=(const MontField& a, const MontField& b) { return a.v_ != b.v_; }

    MontField& operator+=(const MontField& b) {
        if constexpr (P::N == 4) {
            add4(v_.data(), b.v_.data());
            return *this;
        }
        u64 carry = 0;
        for (int i = 0; i < P::N; ++i) {
            u128 s = static_cast<u128>(v_[i]) + b.v_[i] + carry;
            v_[i] = static_cast<u64>(s);
            carry = static_cast<u64>(s >> 64);
        }
        if (geq_p(v_.data())) sub_p(v_.data());
        return *this;
    }
    MontField& operator-=(const MontField& b) {
        if constexpr (P::N == 4) {
            sub4(v_.data(), b.v_.data());
            return *this;
        }
        u64 borrow = 0;
        for (int i = 0; i < P::N; ++i) {
            u128 d = static_cast<u128>(v_[i]) - b.v_[i] - borrow;
            v_[i] = static_cast<u64>(d);
            borrow = static_cast<u64>(d >> 64) & 1;
        }
        if (borrow) add_p(v_.data());
        return *this;
    }
    MontField& operator*=(const MontField& b) {
        u64 out[P::N];
        mont_mul(out, v_.data(), b.v_.data());
        for (int i = 0; i < P::N; ++i) v_[i] = out[i];
        return *this;
    }
    friend MontField operator+(MontField a, const MontField& b) { return a += b; }
    friend MontField operator-(MontField a, const MontField& b) { return a -= b; }
    friend MontField operator*(MontField a, const MontField& b) { return a *= b; }
    MontField operator-() const { return MontField() - *this; }

    MontField square() const { return *this * *this; }

    template <std::size_t M>
    MontField pow(const std::array<u64, M>& e) const {
        MontField r = one();
        for (int i = static_cast<int>(M) - 1; i >= 0; --i)
            for (int b = 63; b >= 0; --b) {
                r = r.square();
                if ((e[i] >> b) & 1) r *= *this;
            }
        return r;
    }
    MontField pow(u64 e) const { return pow(std::array<u64, 1>{e}); }

    MontField inverse() const {
        if (is_zero()) throw InversionOfZero();
        Limbs e;
        for (int i = 0; i < P::N; ++i) e[i] = P::p[i];
        e[0] -= 2;  // p is odd and > 2, no borrow
        return pow(e);
    }

    void to_bytes(std::uint8_t* out) const {
        Limbs c = canonical();
        for (int i = 0; i < P::N; ++i)
            for (int b = 0; b < 8; ++b) out[8 * i + b] = static_cast<std::uint8_t>(c[i] >> (8 * b));
    }
    // Rejects non-canonical encodings.
    static bool from_bytes(const std::uint8_t* in, MontField& out) {
        Limbs a{};
        for (int i = 0; i < P::N; ++i)
            for (int b = 0; b < 8; ++b) a[i] |= static_cast<u64>(in[8 * i + b]) << (8 * b);
        if (geq_p(a.data())) return false;
        out = from_canonical(a);
        return true;
    }
    // Reduces 2*kBytes uniform bytes: lo + hi * 2^(64N).
    static MontField from_wide(const std::uint8_t* in) {
        Limbs lo{}, hi{};
        for (int i = 0; i < P::N; ++i)
            for (int b = 0; b < 8; ++b) {
                lo[i] |= static_cast<u64>(in[8 * i + b]) << (8 * b);
                hi[i] |= static_cast<u64>(in[kBytes + 8 * i + b]) << (8 * b);
            }
        MontField a, h;
        mont_mul(a.v_.data(), lo.data(), P::R2);
        mont_mul(h.v_.data(), hi.data(), P::R3);
        return a + h;
    }

    template <class Rng>
    static MontField random(Rng& rng) {
        for (;;) {
            Limbs a;
            for (auto& x : a) x = rng();
            a[P::N - 1] &= P::top_mask;
            if (!geq_p(a.data())) return from_canonical(a);
        }
    }

    // Centered lift: values above p/2 are negative. Throws if |x| >= 2^127.
    i128 to_i128() const {
        Limbs c = canonical();
        bool neg = !leq_half(c.data());
        if (neg) c = neg_canonical(c);
        for (int i = 2; i < P::N; ++i)
            if (c[i]) throw std::range_error("field element does not fit a signed 128-bit lift");
        u128 m = c[0];
        if constexpr (P::N > 1) m |= static_cast<u128>(c[1]) << 64;
        if (m >> 127) throw std::range_error("field element does not fit a signed 128-bit lift");
        i128 s = static_cast<i128>(m);
        return neg ? -s : s;
    }
    std::int64_t to_i64() const {
        i128 x = to_i128();
        if (x > INT64_MAX || x < INT64_MIN) throw std::range_error("field element does not fit int64");
        return static_cast<std::int64_t>(x);
    }
    bool is_negative() const {
        Limbs c = canonical();
        return !leq_half(c.data());
    }

    std::string to_hex() const {
        static const char* d = "0123456789abcdef";
        Limbs c = canonical();
        std::string s;
        for (int i = P::N - 1; i >= 0; --i)
            for (int b = 15; b >= 0; --b) s += d[(c[i] >> (4 * b)) & 15];
        return s;
    }

    static Limbs modulus() {
        Limbs m;
        for (int i = 0; i < P::N; ++i) m[i] = P::p[i];
        return m;
    }
    static constexpr int bits() { return P::bits; }
    static constexpr const char* name() { return P::name; }

private:
    Limbs v_;

    static bool geq_p(const u64* a) {
        for (int i = P::N - 1; i >= 0; --i) {
            if (a[i] > P::p[i]) return true;
            if (a[i] < P::p[i]) return false;
        }
        return true;
    }
    static void sub_p(u64* a) {
        u64 borrow = 0;
        for (int i = 0; i < P::N; ++i) {
            u128 d = static_cast<u128>(a[i]) - P::p[i] - borrow;
            a[i] = static_cast<u64>(d);
            borrow = static_cast<u64>(d >> 64) & 1;
        }
    }
    static void add_p(u64* a) {
        u64 carry = 0;
        for (int i = 0; i < P::N; ++i) {
            u128 s = static_cast<u128>(a[i]) + P::p[i] + carry;
            a[i] = static_cast<u64>(s);
            carry = static_cast<u64>(s >> 64);
        }
    }
    static Limbs reduce_once(Limbs a) {
        while (geq_p(a.data())) sub_p(a.data());
        return a;
    }
    // a <= (p-1)/2
    static bool leq_half(const u64* a) {
        Limbs h;
        for (int i = 0; i < P::N; ++i) h[i] = P::p[i];
        for (int i = 0; i < P::N; ++i) {
            h[i] >>= 1;
            if (i + 1 < P::N) h[i] |= P::p[i + 1] << 63;
        }
        for (int i = P::N - 1; i >= 0; --i) {
            if (a[i] < h[i]) return true;
            if (a[i] > h[i]) return false;
        }
        return true;
    }
    static Limbs neg_canonical(const Limbs& a) {
        Limbs r;
        u64 borrow = 0;
        for (int i = 0; i < P::N; ++i) {
            u128 d = static_cast<u128>(P::p[i]) - a[i] - borrow;
            r[i] = static_cast<u64>(d);
            borrow = static_cast<u64>(d >> 64) & 1;
        }
        return r;
    }

    static inline void add4(u64* a, const u64* b) {
        u128 s = static_cast<u128>(a[0]) + b[0];
        u64 r0 = static_cast<u64>(s);
        s = static_cast<u128>(a[1]) + b[1] + static_cast<u64>(s >> 64);
        u64 r1 = static_cast<u64>(s);
        s = static_cast<u128>(a[2]) + b[2] + static_cast<u64>(s >> 64);
        u64 r2 = static_cast<u64>(s);
        u64 r3 = a[3] + b[3] + static_cast<u64>(s >> 64);  // p < 2^254: no carry out
        // t = r - p
        u128 d = static_cast<u128>(r0) - P::p[0];
        u64 t0 = static_cast<u64>(d);
        d = static_cast<u128>(r1) - P::p[1] - (static_cast<u64>(d >> 64) & 1);
        u64 t1 = static_cast<u64>(d);
        d = static_cast<u128>(r2) - P::p[2] - (static_cast<u64>(d >> 64) & 1);
        u64 t2 = static_cast<u64>(d);
        d = static_cast<u128>(r3) - P::p[3] - (static_cast<u64>(d >> 64) & 1);
        u64 t3 = static_cast<u64>(d);
        bool borrow = static_cast<u64>(d >> 64) & 1;
        a[0] = borrow ? r0 : t0;
        a[1] = borrow ? r1 : t1;
        a[2] = borrow ? r2 : t2;
        a[3] = borrow ? r3 : t3;
    }
    static inline void sub4(u64* a, const u64* b) {
        u128 d = static_cast<u128>(a[0]) - b[0];
        u64 r0 = static_cast<u64>(d);
        d = static_cast<u128>(a[1]) - b[1] - (static_cast<u64>(d >> 64) & 1);
        u64 r1 = static_cast<u64>(d);
        d = static_cast<u128>(a[2]) - b[2] - (static_cast<u64>(d >> 64) & 1);
        u64 r2 = static_cast<u64>(d);
        d = static_cast<u128>(a[3]) - b[3] - (static_cast<u64>(d >> 64) & 1);
        u64 r3 = static_cast<u64>(d);
        u64 mask = 0 - (static_cast<u64>(d >> 64) & 1);
        u128 s = static_cast<u128>(r0) + (P::p[0] & mask);
        a[0] = static_cast<u64>(s);
        s = static_cast<u128>(r1) + (P::p[1] & mask) + static_cast<u64>(s >> 64);
        a[1] = static_cast<u64>(s);
        s = static_cast<u128>(r2) + (P::p[2] & mask) + static_cast<u64>(s >> 64);
        a[2] = static_cast<u64>(s);
        a[3] = r3 + (P::p[3] & mask) + static_cast<u64>(s >> 64);
    }

    // Fully unrolled CIOS for four limbs.
    static inline void mont_mul4(u64* r, const u64* a, const u64* b) {
        u64 t0 = 0, t1 = 0, t2 = 0, t3 = 0, t4 = 0;
        for (int i = 0; i < 4; ++i) {
            const u64 bi = b[i];
            u128 s = static_cast<u128>(a[0]) * bi + t0;
            t0 = static_cast<u64>(s);
            s = static_cast<u128>(a[1]) * bi + t1 + static_cast<u64>(s >> 64);
            t1 = static_cast<u64>(s);
            s = static_cast<u128>(a[2]) * bi + t2 + static_cast<u64>(s >> 64);
            t2 = static_cast<u64>(s);
            s = static_cast<u128>(a[3]) * bi + t3 + static_cast<u64>(s >> 64);
            t3 = static_cast<u64>(s);
            u128 top = static_cast<u128>(t4) + static_cast<u64>(s >> 64);
            const u64 m = t0 * P::inv;
            s = static_cast<u128>(m) * P::p[0] + t0;
            s = static_cast<u128>(m) * P::p[1] + t1 + static_cast<u64>(s >> 64);
            t0 = static_cast<u64>(s);
            s = static_cast<u128>(m) * P::p[2] + t2 + static_cast<u64>(s >> 64);
            t1 = static_cast<u64>(s);
            s = static_cast<u128>(m) * P::p[3] + t3 + static_cast<u64>(s >> 64);
            t2 = static_cast<u64>(s);
            top += static_cast<u64>(s >> 64);
            t3 = static_cast<u64>(top);
            t4 = static_cast<u64>(top >> 64);
        }
        u64 t[4] = {t0, t1, t2, t3};
        if (t4 || geq_p(t)) sub_p(t);
        r[0] = t[0];
        r[1] = t[1];
        r[2] = t[2];
        r[3] = t[3];
    }

    // CIOS Montgomery multiplication, inputs < 2^(64N), output < p when one input < p.
    static void mont_mul(u64* r, const u64* a, const u64* b) {
        constexpr int N = P::N;
        if constexpr (N == 4) {
            mont_mul4(r, a, b);
            return;
        }
        u64 t[N + 2] = {};
        for (int i = 0; i < N; ++i) {
            u64 c = 0;
            for (int j = 0; j < N; ++j) {
                u128 s = static_cast<u128>(a[j]) * b[i] + t[j] + c;
                t[j] = static_cast<u64>(s);
                c = static_cast<u64>(s >> 64);
            }
            u128 s = static_cast<u128>(t[N]) + c;
            t[N] = static_cast<u64>(s);
            t[N + 1] = static_cast<u64>(s >> 64);
            u64 m = t[0] * P::inv;
            s = static_cast<u128>(m) * P::p[0] + t[0];
            c = static_cast<u64>(s >> 64);
            for (int j = 1; j < N; ++j) {
                s = static_cast<u128>(m) * P::p[j] + t[j] + c;
                t[j - 1] = static_cast<u64>(s);
                c = static_cast<u64>(s >> 64);
            }
            s = static_cast<u128>(t[N]) + c;
            t[N - 1] = static_cast<u64>(s);
            t[N] = t[N + 1] + static_cast<u64>(s >> 64);
        }
        if (t[N] || geq_p(t)) sub_p(t);
        for (int i = 0; i < N; ++i) r[i] = t[i];
    }
};

struct Bn254FrParams {
    static constexpr int N = 4;
    static constexpr int bits = 254;
    static constexpr u64 top_mask = 0x3fffffffffffffffULL;
    static constexpr const char* name = "bn254-fr";
    static constexpr u64 p[4] = {0x43e1f593f0000001ULL, 0x2833e84879b97091ULL, 0xb85045b68181585dULL,
                                 0x30644e72e131a029ULL};
    static constexpr u64 R[4] = {0xac96341c4ffffffbULL, 0x36fc76959f60cd29ULL, 0x666ea36f7879462eULL,
                                 0x0e0a77c19a07df2fULL};
    static constexpr u64 R2[4] = {0x1bb8e645ae216da7ULL, 0x53fe3ab1e35c59e3ULL, 0x8c49833d53bb8085ULL,
                                  0x0216d0b17f4e44a5ULL};
    static constexpr u64 R3[4] = {0x5e94d8e1b4bf0040ULL, 0x2a489cbe1cfbb6b8ULL, 0x893cc664a19fcfedULL,
                                  0x0cf8594b7fcc657cULL};
    static constexpr u64 inv = 0xc2e1f593efffffffULL;
};

struct Bn254FqParams {
    static constexpr int N = 4;
    static constexpr int bits = 254;
    static constexpr u64 top_mask = 0x3fffffffffffffffULL;
    static constexpr const char* name = "bn254-fq";
    static constexpr u64 p[4] = {0x3c208c16d87cfd47ULL, 0x97816a916871ca8dULL, 0xb85045b68181585dULL,
                                 0x30644e72e131a029ULL};
    static constexpr u64 R[4] = {0xd35d438dc58f0d9dULL, 0x0a78eb28f5c70b3dULL, 0x666ea36f7879462cULL,
                                 0x0e0a77c19a07df2fULL};
    static constexpr u64 R2[4] = {0xf32cfc5b538afa89ULL, 0xb5e71911d44501fbULL, 0x47ab1eff0a417ff6ULL,
                                  0x06d89f71cab8351fULL};
    static constexpr u64 R3[4] = {0xb1cd6dafda1530dfULL, 0x62f210e6a7283db6ULL, 0xef7f0b0c0ada0afbULL,
                                  0x20fd6e902d592544ULL};
    static constexpr u64 inv = 0x87d20782e4866389ULL;
    // (q + 1) / 4, q = 3 mod 4
    static constexpr std::array<u64, 4> sqrt_exp = {0x4f082305b61f3f52ULL, 0x65e05aa45a1c72a3ULL,
                                                    0x6e14116da0605617ULL, 0x0c19139cb84c680aULL};
};

// Modulus of the toy group: P = k (2^61 - 1) + 1 with k = 0x4000000000000018.
struct ToyPParams {
    static constexpr int N = 2;
    static constexpr int bits = 124;
    static constexpr u64 top_mask = 0x0fffffffffffffffULL;
    static constexpr const char* name = "toy-p124";
    static constexpr u64 p[2] = {0xbfffffffffffffe9ULL, 0x0800000000000002ULL};
    static constexpr u64 R[2] = {0xc0000000000002c9ULL, 0x07ffffffffffffaaULL};
    static constexpr u64 R2[2] = {0xc0000000005f3be9ULL, 0x07fffffffff3a002ULL};
    static constexpr u64 R3[2] = {0, 0};  // unused: toy elements are never derived from wide bytes
    static constexpr u64 inv = 0x937a6f4de9bd37a7ULL;
    static constexpr u64 cofactor = 0x4000000000000018ULL;
};

using Fr = MontField<Bn254FrParams>;
using Fq = MontField<Bn254FqParams>;
using ToyP = MontField<ToyPParams>;

// Mersenne prime 2^61 - 1, canonical (non-Montgomery) representation.
class Fp61 {
public:
    static constexpr u64 kP = (1ULL << 61) - 1;
    static constexpr int kLimbs = 1;
    static constexpr std::size_t kBytes = 8;
    using Limbs = std::array<u64, 1>;

    constexpr Fp61() : v_(0) {}
    explicit Fp61(int x) { *this = from_i64(x); }

    static Fp61 zero() { return Fp61(); }
    static Fp61 one() { return raw(1); }
    static Fp61 from_u64(u64 x) { return raw(reduce(x)); }
    static Fp61 from_i64(std::int64_t x) {
        if (x >= 0) return from_u64(static_cast<u64>(x));
        return -from_u64(static_cast<u64>(-(x + 1)) + 1);
    }
    static Fp61 from_i128(i128 x) {
        bool neg = x < 0;
        u128 m = neg ? static_cast<u128>(-(x + 1)) + 1 : static_cast<u128>(x);
        Fp61 r = raw(reduce128(m));
        return neg ? -r : r;
    }
    static Fp61 from_canonical(const Limbs& a) { return from_u64(a[0]); }

    Limbs canonical() const { return {v_}; }
    u64 value() const { return v_; }

    bool is_zero() const { return v_ == 0; }
    friend bool operator==(Fp61 a, Fp61 b) { return a.v_ == b.v_; }
    friend bool operator!=(Fp61 a, Fp61 b) { return a.v_ != b.v_; }

    Fp61& operator+=(Fp61 b) {
        v_ += b.v_;
        if (v_ >= kP) v_ -= kP;
        return *this;
    }
    Fp61& operator-=(Fp61 b) {
        v_ = v_ >= b.v_ ? v_ - b.v_ : v_ + kP - b.v_;
        return *this;
    }
    Fp61& operator*=(Fp61 b) {
        v_ = reduce128(static_cast<u128>(v_) * b.v_);
        return *this;
    }
    friend Fp61 operator+(Fp61 a, Fp61 b) { return a += b; }
    friend Fp61 operator-(Fp61 a, Fp61 b) { return a -= b; }
    friend Fp61 operator*(Fp61 a, Fp61 b) { return a *= b; }
    Fp61 operator-() const { return raw(v_ ? kP - v_ : 0); }
    Fp61 square() const { return *this * *this; }

    template <std::size_t M>
    Fp61 pow(const std::array<u64, M>& e) const {
        Fp61 r = one();
        for (int i = static_cast<int>(M) - 1; i >= 0; --i)
            for (int b = 63; b >= 0; --b) {
                r = r.square();
                if ((e[i] >> b) & 1) r *= *this;
            }
        return r;
    }
    Fp61 pow(u64 e) const { return pow(std::array<u64, 1>{e}); }
    Fp61 inverse() const {
        if (is_zero()) throw InversionOfZero();
        return pow(kP - 2);
    }

    void to_bytes(std::uint8_t* out) const {
        for (int b = 0; b < 8; ++b) out[b] = static_cast<std::uint8_t>(v_ >> (8 * b));
    }
    static bool from_bytes(const std::uint8_t* in, Fp61& out) {
        u64 a = 0;
        for (int b = 0; b < 8; ++b) a |= static_cast<u64>(in[b]) << (8 * b);
        if (a >= kP) return false;
        out = raw(a);
        return true;
    }
    static Fp61 from_wide(const std::uint8_t* in) {
        u128 a = 0;
        for (int b = 15; b >= 0; --b) a = (a << 8) | in[b];
        return raw(reduce128(a));
    }
    template <class Rng>
    static Fp61 random(Rng& rng) {
        for (;;) {
            u64 a = rng() & kP;
            if (a < kP) return raw(a);
        }
    }

    i128 to_i128() const { return v_ > kP / 2 ? -static_cast<i128>(kP - v_) : static_cast<i128>(v_); }
    std::int64_t to_i64() const { return static_cast<std::int64_t>(to_i128()); }
    bool is_negative() const { return v_ > kP / 2; }

    std::string to_hex() const {
        static const char* d = "0123456789abcdef";
        std::string s;
        for (int b = 15; b >= 0; --b) s += d[(v_ >> (4 * b)) & 15];
        return s;
    }
    static Limbs modulus() { return {kP}; }
    static constexpr int bits() { return 61; }
    static constexpr const char* name() { return "fp61"; }

private:
    u64 v_;
    static Fp61 raw(u64 x) {
        Fp61 r;
        r.v_ = x;
        return r;
    }
    static u64 reduce(u64 x) {
        x = (x & kP) + (x >> 61);
        return x >= kP ? x - kP : x;
    }
    static u64 reduce128(u128 x) {
        u64 lo = static_cast<u64>(x) & kP;
        u128 hi = x >> 61;
        u64 a = static_cast<u64>(hi & kP);
        u64 b = static_cast<u64>(hi >> 61);
        u64 s = lo + a;  // < 2^62
        s = (s & kP) + (s >> 61) + b;
        s = (s & kP) + (s >> 61);
        return s >= kP ? s - kP : s;
    }
};

template <class F>
void batch_inverse(F* v, std::size_t n) {
    if (n == 0) return;
    std::vector<F> prefix(n);
    F acc = F::one();
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i] = acc;
        acc *= v[i];
    }
    F inv = acc.inverse();
    for (std::size_t i = n; i-- > 0;) {
        F t = inv * prefix[i];
        inv *= v[i];
        v[i] = t;
    }
}

}  // namespace zkl

namespace Eigen {

template <class P>
struct NumTraits<zkl::MontField<P>> : GenericNumTraits<zkl::MontField<P>> {
    using Real = zkl::MontField<P>;
    using NonInteger = zkl::MontField<P>;
    using Literal = zkl::MontField<P>;
    using Nested = zkl::MontField<P>;
    enum {
        IsComplex = 0,
        IsInteger = 1,
        IsSigned = 0,
        RequireInitialization = 1,
        ReadCost = P::N,
        AddCost = 2 * P::N,
        MulCost = 4 * P::N * P::N
    };
};

template <>
struct NumTraits<zkl::Fp61> : GenericNumTraits<zkl::Fp61> {
    using Real = zkl::Fp61;
    using NonInteger = zkl::Fp61;
    using Literal = zkl::Fp61;
    using Nested = zkl::Fp61;
    enum { IsComplex = 0, IsInteger = 1, IsSigned = 0, RequireInitialization = 1, ReadCost = 1, AddCost = 1, MulCost = 3 };
};

}  // namespace Eigen

namespace zkl {

template <class F>
using FMat = Eigen::Matrix<F, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class F>
using FVec = Eigen::Matrix<F, Eigen::Dynamic, 1>;

template <class F>
    requires requires(const F& x) { x.to_hex(); }
std::ostream& operator<<(std::ostream& os, const F& x) {
    return os << x.to_hex();
}

}  // namespace zkl
