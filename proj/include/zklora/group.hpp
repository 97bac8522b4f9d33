#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "field.hpp"
#include "transcript.hpp"

namespace zkl {

// BN254 G1: y^2 = x^3 + 3 over Fq, prime order r (= Fr modulus), cofactor 1.
struct G1Affine {
    static constexpr std::size_t kBytes = 32;
    Fq x, y;
    bool inf = true;

    bool is_identity() const { return inf; }
    G1Affine operator-() const {
        G1Affine r = *this;
        if (!inf) r.y = -y;
        return r;
    }
    friend bool operator==(const G1Affine& a, const G1Affine& b) {
        if (a.inf || b.inf) return a.inf == b.inf;
        return a.x == b.x && a.y == b.y;
    }
    bool on_curve() const { return inf || y.square() == x.square() * x + Fq::from_u64(3); }

    // x little-endian; bit 255 = y parity, bit 254 = point at infinity.
    void to_bytes(std::uint8_t* out) const {
        if (inf) {
            std::fill(out, out + 32, 0);
            out[31] = 0x40;
            return;
        }
        x.to_bytes(out);
        if (y.canonical()[0] & 1) out[31] |= 0x80;
    }
    static bool from_bytes(const std::uint8_t* in, G1Affine& out) {
        std::uint8_t b[32];
        std::copy(in, in + 32, b);
        bool odd = b[31] & 0x80, infinity = b[31] & 0x40;
        b[31] &= 0x3f;
        if (infinity) {
            for (int i = 0; i < 32; ++i)
                if (b[i] || odd) return false;
            out = G1Affine{};
            return true;
        }
        Fq x;
        if (!Fq::from_bytes(b, x)) return false;
        Fq rhs = x.square() * x + Fq::from_u64(3);
        Fq y = rhs.pow(Bn254FqParams::sqrt_exp);
        if (y.square() != rhs) return false;
        if (static_cast<bool>(y.canonical()[0] & 1) != odd) y = -y;
        out.x = x;
        out.y = y;
        out.inf = false;
        return true;
    }
};

struct G1 {
    using Affine = G1Affine;
    Fq X, Y, Z;  // Jacobian; Z = 0 is the identity

    static G1 identity() { return G1{Fq::one(), Fq::one(), Fq::zero()}; }
    static G1 from_affine(const G1Affine& a) { return a.inf ? identity() : G1{a.x, a.y, Fq::one()}; }
    bool is_identity() const { return Z.is_zero(); }

    G1 dbl() const {
        if (is_identity()) return *this;
        Fq A = X.square(), B = Y.square(), C = B.square();
        Fq t = X + B;
        Fq D = t.square() - A - C;
        D += D;
        Fq E = A + A + A;
        Fq Fv = E.square();
        G1 r;
        r.X = Fv - D - D;
        Fq C8 = C + C;
        C8 += C8;
        C8 += C8;
        r.Y = E * (D - r.X) - C8;
        r.Z = Y * Z;
        r.Z += r.Z;
        return r;
    }

    G1& add_mixed(const G1Affine& q) {
        if (q.inf) return *this;
        if (is_identity()) return *this = from_affine(q);
        Fq Z1Z1 = Z.square();
        Fq U2 = q.x * Z1Z1;
        Fq S2 = q.y * Z * Z1Z1;
        Fq H = U2 - X;
        Fq r = S2 - Y;
        if (H.is_zero()) {
            if (r.is_zero()) return *this = dbl();
            return *this = identity();
        }
        r += r;
        Fq HH = H.square();
        Fq I = HH + HH;
        I += I;
        Fq J = H * I;
        Fq V = X * I;
        Fq X3 = r.square() - J - V - V;
        Fq YJ = Y * J;
        Fq Y3 = r * (V - X3) - YJ - YJ;
        Fq Z3 = (Z + H).square() - Z1Z1 - HH;
        X = X3;
        Y = Y3;
        Z = Z3;
        return *this;
    }

    G1& operator+=(const G1& q) {
        if (q.is_identity()) return *this;
        if (is_identity()) return *this = q;
        Fq Z1Z1 = Z.square(), Z2Z2 = q.Z.square();
        Fq U1 = X * Z2Z2, U2 = q.X * Z1Z1;
        Fq S1 = Y * q.Z * Z2Z2, S2 = q.Y * Z * Z1Z1;
        Fq H = U2 - U1;
        Fq r = S2 - S1;
        if (H.is_zero()) {
            if (r.is_zero()) return *this = dbl();
            return *this = identity();
        }
        Fq H2 = H + H;
        Fq I = H2.square();
        Fq J = H * I;
        r += r;
        Fq V = U1 * I;
        Fq X3 = r.square() - J - V - V;
        Fq SJ = S1 * J;
        Fq Y3 = r * (V - X3) - SJ - SJ;
        Fq Z3 = ((Z + q.Z).square() - Z1Z1 - Z2Z2) * H;
        X = X3;
        Y = Y3;
        Z = Z3;
        return *this;
    }
    friend G1 operator+(G1 a, const G1& b) { return a += b; }
    G1 operator-() const { return G1{X, -Y, Z}; }
    G1& operator-=(const G1& q) { return *this += -q; }

    G1Affine to_affine() const {
        if (is_identity()) return G1Affine{};
        Fq zi = Z.inverse(), zi2 = zi.square();
        return G1Affine{X * zi2, Y * zi2 * zi, false};
    }
    static std::vector<G1Affine> normalize(std::span<const G1> pts) {
        std::vector<Fq> z;
        z.reserve(pts.size());
        for (const auto& p : pts) z.push_back(p.is_identity() ? Fq::one() : p.Z);
        batch_inverse(z.data(), z.size());
        std::vector<G1Affine> out(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (pts[i].is_identity()) continue;
            Fq zi2 = z[i].square();
            out[i] = G1Affine{pts[i].X * zi2, pts[i].Y * zi2 * z[i], false};
        }
        return out;
    }
    bool equals(const G1& q) const {
        if (is_identity() || q.is_identity()) return is_identity() == q.is_identity();
        Fq z1 = Z.square(), z2 = q.Z.square();
        return X * z2 == q.X * z1 && Y * z2 * q.Z == q.Y * z1 * Z;
    }

    // Try-and-increment hash onto the curve.
    static G1Affine hash_to_group(std::span<const std::uint8_t> msg) {
        for (std::uint32_t ctr = 0;; ++ctr) {
            std::vector<std::uint8_t> in(msg.begin(), msg.end());
            for (int i = 0; i < 4; ++i) in.push_back(static_cast<std::uint8_t>(ctr >> (8 * i)));
            std::array<std::uint8_t, 65> h;
            shake256(in, h);
            Fq x = Fq::from_wide(h.data());
            Fq rhs = x.square() * x + Fq::from_u64(3);
            Fq y = rhs.pow(Bn254FqParams::sqrt_exp);
            if (y.square() != rhs) continue;
            if (static_cast<bool>(y.canonical()[0] & 1) != static_cast<bool>(h[64] & 1)) y = -y;
            return G1Affine{x, y, false};
        }
    }
};

// Toy group: the order-(2^61 - 1) subgroup of the multiplicative group of F_P, P 124-bit.
struct ToyElem {
    using Affine = ToyElem;
    static constexpr std::size_t kBytes = 16;
    ToyP v = ToyP::one();

    static ToyElem identity() { return ToyElem{}; }
    static ToyElem from_affine(const ToyElem& a) { return a; }
    bool is_identity() const { return v == ToyP::one(); }
    ToyElem dbl() const { return ToyElem{v.square()}; }
    ToyElem& add_mixed(const ToyElem& q) { return *this += q; }
    ToyElem& operator+=(const ToyElem& q) {
        v *= q.v;
        return *this;
    }
    friend ToyElem operator+(ToyElem a, const ToyElem& b) { return a += b; }
    ToyElem operator-() const { return ToyElem{v.inverse()}; }
    ToyElem& operator-=(const ToyElem& q) { return *this += -q; }
    ToyElem to_affine() const { return *this; }
    static std::vector<ToyElem> normalize(std::span<const ToyElem> pts) { return {pts.begin(), pts.end()}; }
    bool equals(const ToyElem& q) const { return v == q.v; }
    friend bool operator==(const ToyElem& a, const ToyElem& b) { return a.v == b.v; }

    void to_bytes(std::uint8_t* out) const { v.to_bytes(out); }
    static bool from_bytes(const std::uint8_t* in, ToyElem& out) {
        ToyP x;
        if (!ToyP::from_bytes(in, x) || x.is_zero()) return false;
        if (x.pow(Fp61::kP) != ToyP::one()) return false;
        out.v = x;
        return true;
    }
    static ToyElem hash_to_group(std::span<const std::uint8_t> msg) {
        for (std::uint32_t ctr = 0;; ++ctr) {
            std::vector<std::uint8_t> in(msg.begin(), msg.end());
            for (int i = 0; i < 4; ++i) in.push_back(static_cast<std::uint8_t>(ctr >> (8 * i)));
            std::array<std::uint8_t, 16> h;
            shake256(in, h);
            h[15] &= 0x0f;
            ToyP x;
            if (!ToyP::from_bytes(h.data(), x) || x.is_zero()) continue;
            ToyP g = x.pow(ToyPParams::cofactor);
            if (g == ToyP::one()) continue;
            return ToyElem{g};
        }
    }
};

// Scalar field and group bundled; everything above field-core is templated on a backend.
struct Bn254 {
    using F = Fr;
    using Point = G1;
    using Affine = G1Affine;
    static constexpr std::uint8_t kMode = 1;
    static constexpr const char* kName = "big";
};

struct Toy61 {
    using F = Fp61;
    using Point = ToyElem;
    using Affine = ToyElem;
    static constexpr std::uint8_t kMode = 2;
    static constexpr const char* kName = "test";
};

template <class B>
using PointBytes = std::array<std::uint8_t, B::Affine::kBytes>;

template <class B>
PointBytes<B> encode_point(const typename B::Affine& a) {
    PointBytes<B> b;
    a.to_bytes(b.data());
    return b;
}

// Double-and-add over the canonical scalar bits.
template <class B>
typename B::Point scalar_mul(const typename B::Point& p, const typename B::F& s) {
    using Point = typename B::Point;
    auto limbs = s.canonical();
    Point r = Point::identity();
    for (int i = static_cast<int>(limbs.size()) - 1; i >= 0; --i)
        for (int b = 63; b >= 0; --b) {
            r = r.dbl();
            if ((limbs[i] >> b) & 1) r += p;
        }
    return r;
}

}  // namespace zkl
