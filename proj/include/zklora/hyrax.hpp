#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "mle.hpp"
#include "msm.hpp"
#include "transcript.hpp"

namespace zkl {

// Row/column split of an n-variable table: the high ceil(n/2) variables index rows.
inline int row_vars(int n) { return (n + 1) / 2; }
inline int col_vars(int n) { return n / 2; }

template <class B>
struct CommitmentKey {
    using F = typename B::F;
    using Affine = typename B::Affine;

    int max_vars = 0;
    std::vector<Affine> G;
    Affine H;
    std::vector<Affine> G_prefix;  // G_prefix[k] = sum_{j < 2^k} G_j
    FixedBase<B> H_table;

    std::size_t max_cols() const { return G.size(); }

    static CommitmentKey keygen(int max_vars, std::span<const std::uint8_t> seed) {
        if (max_vars < 0 || max_vars > 30) throw KeyTooSmall("keygen: max_vars must be in [0, 30]");
        CommitmentKey k;
        k.max_vars = max_vars;
        const std::size_t cols = std::size_t{1} << col_vars(max_vars);
        auto derive = [&](std::uint64_t index) {
            std::vector<std::uint8_t> msg{'z', 'k', 'l', '-', 'g', 'e', 'n'};
            msg.insert(msg.end(), seed.begin(), seed.end());
            for (int i = 0; i < 8; ++i) msg.push_back(static_cast<std::uint8_t>(index >> (8 * i)));
            return B::Point::hash_to_group(msg);
        };
        k.G.reserve(cols);
        for (std::size_t j = 0; j < cols; ++j) k.G.push_back(derive(j));
        k.H = derive(~std::uint64_t{0});
        std::vector<typename B::Point> sums;
        typename B::Point acc = B::Point::identity();
        std::size_t next = 1;
        for (std::size_t j = 0; j < cols; ++j) {
            acc.add_mixed(k.G[j]);
            if (j + 1 == next) {
                sums.push_back(acc);
                next <<= 1;
            }
        }
        k.G_prefix = B::Point::normalize(sums);
        k.H_table = FixedBase<B>(k.H);
        return k;
    }
};

template <class B>
class Commitment {
public:
    using Affine = typename B::Affine;
    int num_vars = 0;
    std::vector<PointBytes<B>> rows;

    // Decodes on first use; throws ParseError on an invalid encoding.
    const std::vector<Affine>& points() const {
        if (!decoded_) {
            std::vector<Affine> pts(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                if (!Affine::from_bytes(rows[i].data(), pts[i])) throw ParseError("invalid group element encoding");
            decoded_ = std::move(pts);
        }
        return *decoded_;
    }
    void set_points(std::vector<Affine> pts) {
        rows.resize(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) pts[i].to_bytes(rows[i].data());
        decoded_ = std::move(pts);
    }
    void absorb(Transcript& tr, std::string_view label) const {
        std::vector<std::uint8_t> b;
        b.reserve(rows.size() * Affine::kBytes + 1);
        b.push_back(static_cast<std::uint8_t>(num_vars));
        for (const auto& r : rows) b.insert(b.end(), r.begin(), r.end());
        tr.append(label, b);
    }
    friend bool operator==(const Commitment& a, const Commitment& b) {
        return a.num_vars == b.num_vars && a.rows == b.rows;
    }

private:
    mutable std::optional<std::vector<Affine>> decoded_;
};

template <class B, class Rng>
std::vector<typename B::F> random_blinds(int num_vars, Rng& rng) {
    std::vector<typename B::F> b(std::size_t{1} << row_vars(num_vars));
    for (auto& x : b) x = B::F::random(rng);
    return b;
}

// Row-wise Pedersen: C_i = sum_j M_ij G_j + tau_i H. Empty blinds means zero blinding.
template <class B>
Commitment<B> commit(const CommitmentKey<B>& key, std::span<const typename B::F> table,
                     std::span<const typename B::F> blinds) {
    using F = typename B::F;
    using Point = typename B::Point;
    if (!is_pow2(static_cast<std::int64_t>(table.size()))) throw DimensionMismatch("commit: table length");
    const int n = log2_exact(static_cast<std::int64_t>(table.size()));
    const std::size_t nrows = std::size_t{1} << row_vars(n), ncols = std::size_t{1} << col_vars(n);
    if (ncols > key.max_cols()) throw KeyTooSmall("commit: table exceeds key");
    if (!blinds.empty() && blinds.size() != nrows) throw DimensionMismatch("commit: blinding length");
    std::vector<Point> out(nrows);
    std::span<const typename B::Affine> gens(key.G.data(), ncols);
    for (std::size_t i = 0; i < nrows; ++i) {
        std::span<const F> row = table.subspan(i * ncols, ncols);
        bool constant = true;
        for (std::size_t j = 1; j < ncols && constant; ++j) constant = row[j] == row[0];
        Point p = Point::identity();
        if (constant && ncols > 4) {
            if (!row[0].is_zero())
                p = scalar_mul<B>(Point::from_affine(key.G_prefix[col_vars(n)]), row[0]);
        } else {
            p = msm<B>(gens, row);
        }
        if (!blinds.empty() && !blinds[i].is_zero()) p += key.H_table.mul(blinds[i]);
        out[i] = p;
    }
    Commitment<B> c;
    c.num_vars = n;
    c.set_points(Point::normalize(out));
    return c;
}

template <class B>
struct OpeningProof {
    using F = typename B::F;
    F y;
    PointBytes<B> delta{};
    F a;
    std::vector<F> z;
    F z_tau;
};

// Group equations collected during verification and checked as one random linear combination.
template <class B>
class MsmAccumulator {
public:
    using F = typename B::F;
    using Point = typename B::Point;
    using Affine = typename B::Affine;

    explicit MsmAccumulator(const CommitmentKey<B>& key, std::uint64_t seed = std::random_device{}())
        : key_(key), rng_(seed) {}

    struct Check {
        std::string where;
        std::vector<F> gen;  // coefficients on G_j
        F h;
        std::vector<F> sc;
        std::vector<Affine> pts;
    };

    Check& begin(std::string where) {
        checks_.push_back(Check{std::move(where), {}, F::zero(), {}, {}});
        return checks_.back();
    }
    std::size_t size() const { return checks_.size(); }

    // True iff every collected equation is the identity. On failure *where names the first bad one.
    bool finalize(std::string* where = nullptr) {
        if (checks_.empty()) return true;
        std::vector<F> gen(key_.max_cols(), F::zero());
        F h = F::zero();
        std::vector<F> sc;
        std::vector<Affine> pts;
        for (const auto& c : checks_) {
            F rho = F::random(rng_);
            for (std::size_t j = 0; j < c.gen.size(); ++j) gen[j] += rho * c.gen[j];
            h += rho * c.h;
            for (std::size_t k = 0; k < c.sc.size(); ++k) {
                sc.push_back(rho * c.sc[k]);
                pts.push_back(c.pts[k]);
            }
        }
        pts.insert(pts.end(), key_.G.begin(), key_.G.end());
        sc.insert(sc.end(), gen.begin(), gen.end());
        pts.push_back(key_.H);
        sc.push_back(h);
        if (msm<B>(pts, sc).is_identity()) {
            checks_.clear();
            return true;
        }
        for (const auto& c : checks_)
            if (!evaluate(c).is_identity()) {
                if (where) *where = c.where;
                break;
            }
        checks_.clear();
        return false;
    }

    Point evaluate(const Check& c) const {
        std::vector<F> sc = c.sc;
        std::vector<Affine> pts = c.pts;
        for (std::size_t j = 0; j < c.gen.size(); ++j) {
            sc.push_back(c.gen[j]);
            pts.push_back(key_.G[j]);
        }
        sc.push_back(c.h);
        pts.push_back(key_.H);
        return msm<B>(pts, sc);
    }

private:
    const CommitmentKey<B>& key_;
    std::mt19937_64 rng_;
    std::vector<Check> checks_;
};

template <class B, class Rng>
OpeningProof<B> open(const CommitmentKey<B>& key, std::span<const typename B::F> table,
                     std::span<const typename B::F> blinds, std::span<const typename B::F> x, Transcript& tr,
                     Rng& rng) {
    using F = typename B::F;
    using Point = typename B::Point;
    const int n = static_cast<int>(x.size());
    if (table.size() != (std::size_t{1} << n)) throw DimensionMismatch("open: point length");
    const int nr = row_vars(n), nc = col_vars(n);
    const std::size_t nrows = std::size_t{1} << nr, ncols = std::size_t{1} << nc;
    if (!blinds.empty() && blinds.size() != nrows) throw DimensionMismatch("open: blinding length");
    if (ncols > key.max_cols()) throw KeyTooSmall("open: table exceeds key");
    std::vector<F> L = eq_table<F>(x.subspan(0, nr)), R = eq_table<F>(x.subspan(nr));

    std::vector<F> t(ncols, F::zero());
    F tau = F::zero();
    for (std::size_t i = 0; i < nrows; ++i) {
        if (L[i].is_zero()) continue;
        for (std::size_t j = 0; j < ncols; ++j) t[j] += L[i] * table[i * ncols + j];
        if (!blinds.empty()) tau += L[i] * blinds[i];
    }
    OpeningProof<B> pf;
    pf.y = F::zero();
    for (std::size_t j = 0; j < ncols; ++j) pf.y += t[j] * R[j];

    std::vector<F> d(ncols);
    for (auto& v : d) v = F::random(rng);
    F r_delta = F::random(rng);
    Point delta = msm<B>(std::span<const typename B::Affine>(key.G.data(), ncols), d);
    delta += key.H_table.mul(r_delta);
    pf.delta = encode_point<B>(delta.to_affine());
    pf.a = F::zero();
    for (std::size_t j = 0; j < ncols; ++j) pf.a += d[j] * R[j];

    tr.append_field("open.y", pf.y);
    tr.append("open.delta", pf.delta);
    tr.append_field("open.a", pf.a);
    F c = tr.challenge<F>("open.c");
    pf.z.resize(ncols);
    for (std::size_t j = 0; j < ncols; ++j) pf.z[j] = c * t[j] + d[j];
    pf.z_tau = c * tau + r_delta;
    return pf;
}

template <class B>
struct CommitTerm {
    typename B::F coef;
    const Commitment<B>* com;
};

// Verifies an opening of sum_k coef_k [[C_k]] at x. The scalar equation is checked here, the
// group equation is deferred to acc.
template <class B>
bool verify_opening(const CommitmentKey<B>& key, std::span<const CommitTerm<B>> terms,
                    std::span<const typename B::F> x, const OpeningProof<B>& pf, Transcript& tr,
                    MsmAccumulator<B>& acc, std::string where) {
    using F = typename B::F;
    using Affine = typename B::Affine;
    const int n = static_cast<int>(x.size());
    const int nr = row_vars(n), nc = col_vars(n);
    const std::size_t nrows = std::size_t{1} << nr, ncols = std::size_t{1} << nc;
    if (ncols > key.max_cols() || pf.z.size() != ncols) return false;
    for (const auto& t : terms)
        if (t.com->num_vars != n || t.com->rows.size() != nrows) return false;

    tr.append_field("open.y", pf.y);
    tr.append("open.delta", pf.delta);
    tr.append_field("open.a", pf.a);
    F c = tr.challenge<F>("open.c");

    std::vector<F> R = eq_table<F>(x.subspan(nr));
    F lhs = F::zero();
    for (std::size_t j = 0; j < ncols; ++j) lhs += pf.z[j] * R[j];
    if (lhs != c * pf.y + pf.a) return false;

    Affine delta;
    if (!Affine::from_bytes(pf.delta.data(), delta)) return false;
    std::vector<F> L = eq_table<F>(x.subspan(0, nr));
    auto& chk = acc.begin(std::move(where));
    chk.gen = pf.z;
    chk.h = pf.z_tau;
    chk.sc.push_back(-F::one());
    chk.pts.push_back(delta);
    for (const auto& t : terms) {
        const auto& pts = t.com->points();
        F k = -(c * t.coef);
        for (std::size_t i = 0; i < nrows; ++i) {
            if (L[i].is_zero()) continue;
            chk.sc.push_back(k * L[i]);
            chk.pts.push_back(pts[i]);
        }
    }
    return true;
}

template <class B>
bool verify_opening(const CommitmentKey<B>& key, const Commitment<B>& com, std::span<const typename B::F> x,
                    const OpeningProof<B>& pf, Transcript& tr, MsmAccumulator<B>& acc, std::string where) {
    CommitTerm<B> t{B::F::one(), &com};
    return verify_opening<B>(key, std::span<const CommitTerm<B>>(&t, 1), x, pf, tr, acc, std::move(where));
}

}  // namespace zkl
