#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "committed.hpp"
#include "sumcheck.hpp"

namespace zkl {

// Public table of N entries (N a power of two). Pair tables hold (x_j, y_j) and are compressed
// to x_j + alpha*y_j with a transcript challenge.
template <class F>
class LookupTable {
public:
    LookupTable() = default;
    LookupTable(std::string name, std::vector<F> x, std::vector<F> y = {})
        : name_(std::move(name)), x_(std::move(x)), y_(std::move(y)) {
        if (!is_pow2(static_cast<std::int64_t>(x_.size()))) throw DimensionMismatch("lookup table: size");
        if (!y_.empty() && y_.size() != x_.size()) throw DimensionMismatch("lookup table: column sizes");
        // contiguous integer columns get O(1) indexing
        contiguous_ = true;
        lo_ = x_[0];
        for (std::size_t j = 0; j < x_.size() && contiguous_; ++j) contiguous_ = x_[j] == lo_ + F::from_u64(j);
        if (!contiguous_) {
            index_.reserve(x_.size());
            for (std::size_t j = 0; j < x_.size(); ++j) index_.emplace(key(x_[j]), j);
        }
    }

    // x in [lo, lo + count), count a power of two.
    static LookupTable range(std::string name, std::int64_t lo, std::size_t count) {
        std::vector<F> x(count);
        for (std::size_t j = 0; j < count; ++j) x[j] = F::from_i64(lo + static_cast<std::int64_t>(j));
        return LookupTable(std::move(name), std::move(x));
    }
    static LookupTable function(std::string name, std::int64_t lo, std::size_t count,
                                const std::function<std::int64_t(std::int64_t)>& f) {
        std::vector<F> x(count), y(count);
        for (std::size_t j = 0; j < count; ++j) {
            std::int64_t v = lo + static_cast<std::int64_t>(j);
            x[j] = F::from_i64(v);
            y[j] = F::from_i64(f(v));
        }
        return LookupTable(std::move(name), std::move(x), std::move(y));
    }

    const std::string& name() const { return name_; }
    std::size_t size() const { return x_.size(); }
    int num_vars() const { return log2_exact(static_cast<std::int64_t>(x_.size())); }
    bool paired() const { return !y_.empty(); }
    const std::vector<F>& x() const { return x_; }
    const std::vector<F>& y() const { return y_; }

    F entry(std::size_t j, const F& alpha) const { return paired() ? x_[j] + alpha * y_[j] : x_[j]; }
    std::vector<F> combined(const F& alpha) const {
        std::vector<F> t(x_);
        if (paired())
            for (std::size_t j = 0; j < t.size(); ++j) t[j] += alpha * y_[j];
        return t;
    }
    // T~(r) of the compressed column.
    F evaluate(std::span<const F> r, const F& alpha) const {
        F v = mle_eval<F>(x_, r);
        if (paired()) v += alpha * mle_eval<F>(y_, r);
        return v;
    }

    std::optional<std::size_t> index_of(const F& x, const F* y = nullptr) const {
        std::size_t j;
        if (contiguous_) {
            F off = x - lo_;
            auto c = off.canonical();
            for (std::size_t i = 1; i < c.size(); ++i)
                if (c[i]) return std::nullopt;
            if (c[0] >= x_.size()) return std::nullopt;
            j = static_cast<std::size_t>(c[0]);
        } else {
            auto it = index_.find(key(x));
            if (it == index_.end()) return std::nullopt;
            j = it->second;
        }
        if (paired() && (!y || y_[j] != *y)) return std::nullopt;
        return j;
    }

    // 32-byte digest of the entries; binds table files and proofs to the table contents.
    const Digest& digest() const {
        if (digest_) return *digest_;
        std::vector<std::uint8_t> b;
        b.insert(b.end(), name_.begin(), name_.end());
        b.push_back(0);
        std::array<std::uint8_t, F::kBytes> e;
        for (const auto* col : {&x_, &y_})
            for (const auto& v : *col) {
                v.to_bytes(e.data());
                b.insert(b.end(), e.begin(), e.end());
            }
        digest_ = sha3_256(b);
        return *digest_;
    }

private:
    static std::string key(const F& v) {
        std::string s(F::kBytes, '\0');
        v.to_bytes(reinterpret_cast<std::uint8_t*>(s.data()));
        return s;
    }
    std::string name_;
    std::vector<F> x_, y_;
    bool contiguous_ = false;
    F lo_;
    std::unordered_map<std::string, std::size_t> index_;
    mutable std::optional<Digest> digest_;
};

// m_j = |{i : s_i = t_j}|. Throws ElementNotInTable with the first offending index.
template <class F>
std::vector<F> compute_multiplicities(std::span<const F> s, const LookupTable<F>& t) {
    std::vector<std::uint64_t> m(t.size(), 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto j = t.index_of(s[i]);
        if (!j) throw ElementNotInTable(i);
        ++m[*j];
    }
    std::vector<F> out(t.size());
    for (std::size_t j = 0; j < m.size(); ++j) out[j] = F::from_u64(m[j]);
    return out;
}

// One looked-up tensor: entries x_i (+ alpha*y_i for pair tables), each a linear form over
// committed tensors of 2^num_vars entries.
template <class B>
struct LookupRequest {
    int num_vars = 0;
    LinForm<B> x, y;
    std::string where;
};

template <class B>
struct LookupProof {
    using F = typename B::F;
    std::uint8_t redraws = 0;
    Commitment<B> m, A, Bv;
    SumcheckProof<F> sc;
    OpeningProof<B> open_A, open_B, open_m;
    std::vector<OpeningProof<B>> open_S;  // one per distinct request size, largest first
    std::optional<OpeningProof<B>> open_T;
};

inline constexpr int kMaxBetaRedraws = 3;

namespace detail {

// Placement of requests in the padded secret vector: blocks sorted by size (stable, largest
// first) are laid out contiguously, so every block is aligned to its size.
struct LookupLayout {
    std::vector<std::size_t> order;   // request indices in placement order
    std::vector<std::size_t> offset;  // by request index
    std::size_t used = 0;
    int log_d = 0;
    std::vector<int> sizes;  // distinct num_vars, descending
};

template <class B>
LookupLayout layout(const std::vector<LookupRequest<B>>& reqs, int table_vars) {
    LookupLayout L;
    L.order.resize(reqs.size());
    std::iota(L.order.begin(), L.order.end(), 0);
    std::stable_sort(L.order.begin(), L.order.end(),
                     [&](std::size_t a, std::size_t b) { return reqs[a].num_vars > reqs[b].num_vars; });
    L.offset.resize(reqs.size());
    for (std::size_t k : L.order) {
        L.offset[k] = L.used;
        L.used += std::size_t{1} << reqs[k].num_vars;
        if (L.sizes.empty() || L.sizes.back() != reqs[k].num_vars) L.sizes.push_back(reqs[k].num_vars);
    }
    L.log_d = std::max(table_vars, L.used <= 1 ? 0 : log2_exact(next_pow2(static_cast<std::int64_t>(L.used))));
    return L;
}

// eq(prefix bits of a block at `offset` with size 2^k, r[0 .. log_d - k)).
template <class F>
F block_weight(std::size_t offset, int k, int log_d, std::span<const F> r) {
    const int pv = log_d - k;
    const std::size_t prefix = offset >> k;
    F w = F::one();
    for (int b = 0; b < pv; ++b) {
        bool bit = (prefix >> (pv - 1 - b)) & 1;
        w *= bit ? r[b] : F::one() - r[b];
    }
    return w;
}

template <class B>
void absorb_header(Transcript& tr, const LookupTable<typename B::F>& table, const std::vector<LookupRequest<B>>& reqs) {
    tr.append("lk.table", table.digest());
    tr.append_u64("lk.requests", reqs.size());
    for (const auto& q : reqs) {
        tr.append_u64("lk.req.vars", static_cast<std::uint64_t>(q.num_vars));
        for (const auto* f : {&q.x, &q.y}) {
            tr.append_u64("lk.req.terms", f->terms.size());
            for (const auto& t : f->terms) tr.append_field("lk.req.coef", t.coef);
            tr.append_field("lk.req.const", f->constant);
        }
    }
}

// Draws beta, redrawing (at most kMaxBetaRedraws times) while collides(beta).
template <class F>
F draw_beta(Transcript& tr, const std::function<bool(const F&)>& collides, int& redraws) {
    redraws = 0;
    for (;;) {
        F beta = tr.challenge<F>("lk.beta");
        if (!collides(beta)) return beta;
        if (redraws == kMaxBetaRedraws) throw PoleCollision("lookup: beta hits a pole after redraw limit");
        ++redraws;
        tr.append_u64("lk.redraw", static_cast<std::uint64_t>(redraws));
    }
}

template <class B>
std::vector<LinTerm<B>> size_group_terms(const std::vector<LookupRequest<B>>& reqs, const LookupLayout& L, int k,
                                         std::span<const typename B::F> r, const typename B::F& alpha_pair,
                                         typename B::F& const_part, typename B::F& weight_sum) {
    using F = typename B::F;
    std::vector<LinTerm<B>> terms;
    for (std::size_t q : L.order) {
        if (reqs[q].num_vars != k) continue;
        F w = block_weight<F>(L.offset[q], k, L.log_d, r);
        weight_sum += w;
        for (const auto& t : reqs[q].x.terms) terms.push_back(LinTerm<B>{w * t.coef, t.t});
        for (const auto& t : reqs[q].y.terms) terms.push_back(LinTerm<B>{w * alpha_pair * t.coef, t.t});
        const_part += w * (reqs[q].x.constant + alpha_pair * reqs[q].y.constant);
    }
    return terms;
}

}  // namespace detail

// All requests against one table, proven by a single Eq7-shaped sumcheck. With table_com the
// table is opened against its zero-blinding commitment; otherwise the verifier evaluates it.
template <class B>
class LookupBatch {
public:
    using F = typename B::F;

    explicit LookupBatch(const LookupTable<F>& table) : table_(&table) {}

    void add(LookupRequest<B> r) { reqs_.push_back(std::move(r)); }
    const std::vector<LookupRequest<B>>& requests() const { return reqs_; }
    const LookupTable<F>& table() const { return *table_; }
    bool empty() const { return reqs_.empty(); }
    // Number of looked-up elements, padding excluded.
    std::size_t element_count() const {
        std::size_t c = 0;
        for (const auto& q : reqs_) c += std::size_t{1} << q.num_vars;
        return c;
    }
    int sumcheck_vars() const { return detail::layout(reqs_, table_->num_vars()).log_d; }

    template <class Rng>
    LookupProof<B> prove(const CommitmentKey<B>& key, Transcript& tr, Rng& rng,
                         bool open_table = false) const;
    // Skips the membership check and uses the given multiplicities. Only for exercising the
    // verifier against a cheating prover.
    template <class Rng>
    LookupProof<B> prove_with_multiplicities(const CommitmentKey<B>& key, Transcript& tr, Rng& rng,
                                             std::vector<F> m, bool open_table = false) const;
    bool verify(const CommitmentKey<B>& key, const LookupProof<B>& pf, Transcript& tr, MsmAccumulator<B>& acc,
                const Commitment<B>* table_com = nullptr, const Commitment<B>* table_com_y = nullptr) const;

private:
    std::pair<std::vector<F>, std::vector<F>> secret_columns(const detail::LookupLayout& L) const;
    const LookupTable<F>* table_;
    std::vector<LookupRequest<B>> reqs_;
};

template <class B>
std::pair<std::vector<typename B::F>, std::vector<typename B::F>> LookupBatch<B>::secret_columns(
    const detail::LookupLayout& L) const {
    const auto& T = *table_;
    const std::size_t D = std::size_t{1} << L.log_d;
    // secret columns in placement order, padding repeats table entry 0
    std::vector<F> sx(D, T.x()[0]), sy;
    if (T.paired()) sy.assign(D, T.y()[0]);
    for (std::size_t q = 0; q < reqs_.size(); ++q) {
        const auto& r = reqs_[q];
        const std::size_t len = std::size_t{1} << r.num_vars;
        auto vx = r.x.values(len);
        std::copy(vx.begin(), vx.end(), sx.begin() + L.offset[q]);
        if (T.paired()) {
            auto vy = r.y.values(len);
            std::copy(vy.begin(), vy.end(), sy.begin() + L.offset[q]);
        } else if (!r.y.empty()) {
            throw PrecondViolation("lookup: pair request against a single-column table");
        }
    }
    return {std::move(sx), std::move(sy)};
}

template <class B>
template <class Rng>
LookupProof<B> LookupBatch<B>::prove(const CommitmentKey<B>& key, Transcript& tr, Rng& rng,
                                     bool open_table) const {
    const auto& T = *table_;
    const std::size_t N = T.size();
    const int n_t = T.num_vars();
    auto L = detail::layout(reqs_, n_t);
    const std::size_t D = std::size_t{1} << L.log_d;

    auto [sx, sy] = secret_columns(L);
    std::vector<std::uint64_t> mcount(N, 0);
    for (std::size_t i = 0; i < D; ++i) {
        auto j = T.index_of(sx[i], T.paired() ? &sy[i] : nullptr);
        if (!j) {
            for (std::size_t q = 0; q < reqs_.size(); ++q)
                if (i >= L.offset[q] && i < L.offset[q] + (std::size_t{1} << reqs_[q].num_vars))
                    throw ElementNotInTable(i - L.offset[q]);
            throw ElementNotInTable(i);
        }
        ++mcount[*j];
    }
    std::vector<F> m(N);
    for (std::size_t j = 0; j < N; ++j) m[j] = F::from_u64(mcount[j]);
    return prove_with_multiplicities(key, tr, rng, std::move(m), open_table);
}

template <class B>
template <class Rng>
LookupProof<B> LookupBatch<B>::prove_with_multiplicities(const CommitmentKey<B>& key, Transcript& tr, Rng& rng,
                                                         std::vector<F> m, bool open_table) const {
    const auto& T = *table_;
    const std::size_t N = T.size();
    const int n_t = T.num_vars();
    auto L = detail::layout(reqs_, n_t);
    const std::size_t D = std::size_t{1} << L.log_d;
    if (m.size() != N) throw DimensionMismatch("lookup: multiplicity length");
    auto [sx, sy] = secret_columns(L);

    LookupProof<B> pf;
    detail::absorb_header<B>(tr, T, reqs_);
    std::vector<F> m_blinds = random_blinds<B>(n_t, rng);
    pf.m = commit<B>(key, m, m_blinds);
    pf.m.absorb(tr, "lk.m");
    F alpha_pair = T.paired() ? tr.challenge<F>("lk.alpha_pair") : F::zero();

    std::vector<F> s(sx);
    if (T.paired())
        for (std::size_t i = 0; i < D; ++i) s[i] += alpha_pair * sy[i];
    std::vector<F> t = T.combined(alpha_pair);

    std::vector<F> A(D), Bv(N);
    int redraws = 0;
    F beta = detail::draw_beta<F>(
        tr,
        [&](const F& b) {
            for (std::size_t i = 0; i < D; ++i) {
                A[i] = b + s[i];
                if (A[i].is_zero()) return true;
            }
            for (std::size_t j = 0; j < N; ++j) {
                Bv[j] = b + t[j];
                if (Bv[j].is_zero()) return true;
            }
            return false;
        },
        redraws);
    pf.redraws = static_cast<std::uint8_t>(redraws);
    batch_inverse(A.data(), A.size());
    batch_inverse(Bv.data(), Bv.size());

    auto a_blinds = random_blinds<B>(L.log_d, rng);
    auto b_blinds = random_blinds<B>(n_t, rng);
    pf.A = commit<B>(key, A, a_blinds);
    pf.Bv = commit<B>(key, Bv, b_blinds);
    pf.A.absorb(tr, "lk.A");
    pf.Bv.absorb(tr, "lk.B");
    F alpha = tr.challenge<F>("lk.alpha");
    auto u = tr.challenges<F>("lk.u", L.log_d);

    const std::size_t reps = D / N;
    auto replicate = [&](const std::vector<F>& v) {
        std::vector<F> out(D);
        for (std::size_t i = 0; i < reps; ++i) std::copy(v.begin(), v.end(), out.begin() + i * N);
        return out;
    };
    std::span<const F> u_lo(u.data() + (L.log_d - n_t), n_t);
    std::vector<std::vector<F>> factors;
    factors.push_back(A);
    factors.push_back(eq_table<F>(u));
    factors.push_back(s);
    factors.push_back(replicate(Bv));
    factors.push_back(replicate(eq_table<F>(u_lo)));
    factors.push_back(replicate(t));
    factors.push_back(replicate(m));
    ShapeConsts<F> k;
    k.alpha = alpha;
    k.beta = beta;
    k.nd = F::from_u64(N) * F::from_u64(D).inverse();
    SumcheckOutput<F> out;
    pf.sc = prove_sumcheck<F>(Shape::Eq7, std::move(factors), k, alpha + alpha * alpha, tr, out);

    std::span<const F> r(out.point);
    std::span<const F> r_lo = r.subspan(L.log_d - n_t);
    pf.open_A = open<B>(key, A, a_blinds, r, tr, rng);
    pf.open_B = open<B>(key, Bv, b_blinds, r_lo, tr, rng);
    pf.open_m = open<B>(key, m, m_blinds, r_lo, tr, rng);
    for (int sz : L.sizes) {
        F cp = F::zero(), ws = F::zero();
        auto terms = detail::size_group_terms<B>(reqs_, L, sz, r, alpha_pair, cp, ws);
        pf.open_S.push_back(open_combination<B>(key, terms, r.subspan(L.log_d - sz), tr, rng));
    }
    if (open_table) {
        pf.open_T = open<B>(key, t, {}, r_lo, tr, rng);
    }
    return pf;
}

template <class B>
bool LookupBatch<B>::verify(const CommitmentKey<B>& key, const LookupProof<B>& pf, Transcript& tr,
                            MsmAccumulator<B>& acc, const Commitment<B>* table_com,
                            const Commitment<B>* table_com_y) const {
    const auto& T = *table_;
    const std::size_t N = T.size();
    const int n_t = T.num_vars();
    auto L = detail::layout(reqs_, n_t);
    const std::size_t D = std::size_t{1} << L.log_d;
    const std::string where = "lookup " + T.name();

    for (const auto& q : reqs_)
        for (const auto* f : {&q.x, &q.y})
            for (const auto& t : f->terms)
                if (t.t->num_vars() != q.num_vars) return false;
    if (!T.paired())
        for (const auto& q : reqs_)
            if (!q.y.empty()) return false;
    if (pf.m.num_vars != n_t || pf.Bv.num_vars != n_t || pf.A.num_vars != L.log_d) return false;
    if (pf.open_S.size() != L.sizes.size() || pf.open_T.has_value() != (table_com != nullptr)) return false;
    if (pf.redraws > kMaxBetaRedraws) return false;

    detail::absorb_header<B>(tr, T, reqs_);
    pf.m.absorb(tr, "lk.m");
    F alpha_pair = T.paired() ? tr.challenge<F>("lk.alpha_pair") : F::zero();
    F beta = tr.challenge<F>("lk.beta");
    for (int i = 1; i <= pf.redraws; ++i) {
        tr.append_u64("lk.redraw", static_cast<std::uint64_t>(i));
        beta = tr.challenge<F>("lk.beta");
    }
    pf.A.absorb(tr, "lk.A");
    pf.Bv.absorb(tr, "lk.B");
    F alpha = tr.challenge<F>("lk.alpha");
    auto u = tr.challenges<F>("lk.u", L.log_d);

    std::vector<F> r;
    F final_claim;
    if (!verify_sumcheck_rounds<F>(L.log_d, 3, alpha + alpha * alpha, pf.sc, tr, r, final_claim)) return false;
    std::span<const F> rs(r);
    std::span<const F> r_lo = rs.subspan(L.log_d - n_t);
    std::span<const F> u_lo(u.data() + (L.log_d - n_t), n_t);

    if (!verify_opening<B>(key, pf.A, rs, pf.open_A, tr, acc, where + ": A")) return false;
    if (!verify_opening<B>(key, pf.Bv, r_lo, pf.open_B, tr, acc, where + ": B")) return false;
    if (!verify_opening<B>(key, pf.m, r_lo, pf.open_m, tr, acc, where + ": m")) return false;
    F s_val = F::zero(), wsum = F::zero();
    for (std::size_t g = 0; g < L.sizes.size(); ++g) {
        const int sz = L.sizes[g];
        F cp = F::zero();
        auto terms = detail::size_group_terms<B>(reqs_, L, sz, rs, alpha_pair, cp, wsum);
        auto x = rs.subspan(L.log_d - sz);
        if (!verify_combination<B>(key, terms, x, pf.open_S[g], tr, acc, where + ": S")) return false;
        s_val += combination_value<B>(terms, x, pf.open_S[g]) + cp;
    }
    s_val += (F::one() - wsum) * T.entry(0, alpha_pair);

    F t_val;
    if (table_com) {
        std::vector<CommitTerm<B>> ct{CommitTerm<B>{F::one(), table_com}};
        if (T.paired()) {
            if (!table_com_y) return false;
            ct.push_back(CommitTerm<B>{alpha_pair, table_com_y});
        }
        if (!verify_opening<B>(key, ct, r_lo, *pf.open_T, tr, acc, where + ": T")) return false;
        t_val = pf.open_T->y;
    } else {
        t_val = T.evaluate(r_lo, alpha_pair);
    }

    std::vector<F> v{pf.open_A.y, eq_eval<F>(u, rs), s_val, pf.open_B.y, eq_eval<F>(u_lo, r_lo), t_val, pf.open_m.y};
    ShapeConsts<F> k;
    k.alpha = alpha;
    k.beta = beta;
    k.nd = F::from_u64(N) * F::from_u64(D).inverse();
    return combine<F>(Shape::Eq7, v, k) == final_claim;
}

// Zero-blinding commitments of the table columns (the second is empty for single-column tables).
template <class B>
std::pair<Commitment<B>, Commitment<B>> commit_table(const CommitmentKey<B>& key, const LookupTable<typename B::F>& t) {
    std::pair<Commitment<B>, Commitment<B>> c;
    c.first = commit<B>(key, t.x(), {});
    if (t.paired()) c.second = commit<B>(key, t.y(), {});
    return c;
}

// Standalone argument that every entry of the committed S lies in T; T is opened against its
// commitment.
template <class B, class Rng>
LookupProof<B> prove_lookup(const CommitmentKey<B>& key, const Committed<B>& S, const LookupTable<typename B::F>& T,
                            Transcript& tr, Rng& rng) {
    if (T.paired()) throw PrecondViolation("prove_lookup: single-column table expected");
    LookupBatch<B> b(T);
    LookupRequest<B> r;
    r.num_vars = S.num_vars();
    r.x.terms.push_back(LinTerm<B>{B::F::one(), &S});
    r.where = "S";
    b.add(std::move(r));
    return b.prove(key, tr, rng, true);
}

template <class B>
bool verify_lookup(const CommitmentKey<B>& key, const Commitment<B>& S, const LookupTable<typename B::F>& T,
                   const Commitment<B>& T_com, const LookupProof<B>& pf, Transcript& tr, MsmAccumulator<B>& acc) {
    if (T.paired()) return false;
    auto handle = Committed<B>::from_commitment(S);
    LookupBatch<B> b(T);
    LookupRequest<B> r;
    r.num_vars = S.num_vars;
    r.x.terms.push_back(LinTerm<B>{B::F::one(), &handle});
    b.add(std::move(r));
    try {
        return b.verify(key, pf, tr, acc, &T_com);
    } catch (const ParseError&) {
        return false;
    }
}

}  // namespace zkl
