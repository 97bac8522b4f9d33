#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "group.hpp"

namespace zkl {

namespace detail {

template <std::size_t N>
int bit_length(const std::array<u64, N>& a) {
    for (int i = static_cast<int>(N) - 1; i >= 0; --i)
        if (a[i]) return 64 * i + 64 - __builtin_clzll(a[i]);
    return 0;
}

template <std::size_t N>
u64 window_bits(const std::array<u64, N>& a, int lo, int c) {
    int li = lo / 64, off = lo % 64;
    if (li >= static_cast<int>(N)) return 0;
    u64 w = a[li] >> off;
    if (off + c > 64 && li + 1 < static_cast<int>(N)) w |= a[li + 1] << (64 - off);
    return w & ((u64{1} << c) - 1);
}

template <std::size_t N>
bool above_half(const std::array<u64, N>& a, const std::array<u64, N>& p) {
    // a > (p - 1) / 2  <=>  2a > p - 1  <=>  2a >= p
    std::array<u64, N> d{};
    u64 carry = 0;
    for (std::size_t i = 0; i < N; ++i) {
        u64 hi = a[i] >> 63;
        d[i] = (a[i] << 1) | carry;
        carry = hi;
    }
    if (carry) return true;
    for (int i = static_cast<int>(N) - 1; i >= 0; --i) {
        if (d[i] > p[i]) return true;
        if (d[i] < p[i]) return false;
    }
    return true;
}

template <std::size_t N>
std::array<u64, N> sub_limbs(const std::array<u64, N>& p, const std::array<u64, N>& a) {
    std::array<u64, N> r;
    u64 borrow = 0;
    for (std::size_t i = 0; i < N; ++i) {
        u128 d = static_cast<u128>(p[i]) - a[i] - borrow;
        r[i] = static_cast<u64>(d);
        borrow = static_cast<u64>(d >> 64) & 1;
    }
    return r;
}

}  // namespace detail

// Pippenger with signed window digits. Scalars above p/2 are replaced by their negation
// against a negated point, so small signed values cost only a few windows.
template <class B>
typename B::Point msm(std::span<const typename B::Affine> pts, std::span<const typename B::F> sc) {
    using F = typename B::F;
    using Point = typename B::Point;
    using Affine = typename B::Affine;
    using Limbs = typename F::Limbs;
    const std::size_t n = std::min(pts.size(), sc.size());
    const Limbs mod = F::modulus();

    std::vector<Limbs> k;
    std::vector<Affine> P;
    k.reserve(n);
    P.reserve(n);
    int maxbits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sc[i].is_zero() || pts[i].is_identity()) continue;
        Limbs c = sc[i].canonical();
        if (detail::above_half(c, mod)) {
            k.push_back(detail::sub_limbs(mod, c));
            P.push_back(-pts[i]);
        } else {
            k.push_back(c);
            P.push_back(pts[i]);
        }
        maxbits = std::max(maxbits, detail::bit_length(k.back()));
    }
    const std::size_t m = k.size();
    if (m == 0) return Point::identity();
    if (m <= 2) {
        Point acc = Point::identity();
        for (int b = maxbits - 1; b >= 0; --b) {
            acc = acc.dbl();
            for (std::size_t i = 0; i < m; ++i)
                if ((k[i][b / 64] >> (b % 64)) & 1) acc.add_mixed(P[i]);
        }
        return acc;
    }

    int c = 1;
    double best = 1e300;
    for (int cc = 1; cc <= 16; ++cc) {
        double windows = (maxbits + cc - 1) / cc + 1;
        double cost = windows * (static_cast<double>(m) + 2.0 * (1 << (cc - 1)) + cc);
        if (cost < best) {
            best = cost;
            c = cc;
        }
    }
    const int W = (maxbits + c - 1) / c + 1;  // top window absorbs the last carry
    const std::int64_t half = std::int64_t{1} << (c - 1);
    const std::int64_t full = std::int64_t{1} << c;

    // signed digits, window-major
    std::vector<std::int32_t> digits(static_cast<std::size_t>(W) * m);
    for (std::size_t i = 0; i < m; ++i) {
        std::int64_t carry = 0;
        for (int w = 0; w < W; ++w) {
            std::int64_t d = static_cast<std::int64_t>(detail::window_bits(k[i], w * c, c)) + carry;
            if (d >= half && w + 1 < W) {
                d -= full;
                carry = 1;
            } else {
                carry = 0;
            }
            digits[static_cast<std::size_t>(w) * m + i] = static_cast<std::int32_t>(d);
        }
    }

    // negation is an inversion in some groups, so do it once per point
    std::vector<Affine> negP(m);
    for (std::size_t i = 0; i < m; ++i) negP[i] = -P[i];

    std::vector<Point> buckets(static_cast<std::size_t>(half));
    Point result = Point::identity();
    for (int w = W - 1; w >= 0; --w) {
        for (int j = 0; j < c; ++j) result = result.dbl();
        std::fill(buckets.begin(), buckets.end(), Point::identity());
        const std::int32_t* dw = digits.data() + static_cast<std::size_t>(w) * m;
        for (std::size_t i = 0; i < m; ++i) {
            std::int32_t d = dw[i];
            if (d > 0)
                buckets[d - 1].add_mixed(P[i]);
            else if (d < 0)
                buckets[-d - 1].add_mixed(negP[i]);
        }
        Point running = Point::identity(), sum = Point::identity();
        for (std::int64_t b = half - 1; b >= 0; --b) {
            running += buckets[b];
            sum += running;
        }
        result += sum;
    }
    return result;
}

// Precomputed signed 8-bit windows of one base point.
template <class B>
class FixedBase {
public:
    using F = typename B::F;
    using Point = typename B::Point;
    using Affine = typename B::Affine;
    static constexpr int kC = 8;

    FixedBase() = default;
    explicit FixedBase(const Affine& base) {
        windows_ = (F::bits() + 1 + kC - 1) / kC;
        const int half = 1 << (kC - 1);
        std::vector<Point> all;
        all.reserve(static_cast<std::size_t>(windows_) * half);
        Point b = Point::from_affine(base);
        for (int w = 0; w < windows_; ++w) {
            Point acc = b;
            for (int d = 1; d <= half; ++d) {
                all.push_back(acc);
                acc += b;
            }
            for (int j = 0; j < kC; ++j) b = b.dbl();
        }
        table_ = Point::normalize(all);
    }
    bool empty() const { return table_.empty(); }

    Point mul(const F& s) const {
        auto c = s.canonical();
        const int half = 1 << (kC - 1);
        Point r = Point::identity();
        std::int64_t carry = 0;
        for (int w = 0; w < windows_; ++w) {
            std::int64_t d = static_cast<std::int64_t>(detail::window_bits(c, w * kC, kC)) + carry;
            if (d >= half) {
                d -= 1 << kC;
                carry = 1;
            } else {
                carry = 0;
            }
            if (d > 0)
                r.add_mixed(table_[static_cast<std::size_t>(w) * half + d - 1]);
            else if (d < 0)
                r.add_mixed(-table_[static_cast<std::size_t>(w) * half + (-d) - 1]);
        }
        return r;
    }

private:
    int windows_ = 0;
    std::vector<Affine> table_;
};

}  // namespace zkl
