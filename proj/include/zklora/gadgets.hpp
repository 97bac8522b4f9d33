#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tape.hpp"

namespace zkl {

template <class F>
F pow2(int bits) {
    return F::from_u64(2).pow(static_cast<std::uint64_t>(bits));
}

template <class F>
std::vector<F> flatten(const FMat<F>& m) {
    return std::vector<F>(m.data(), m.data() + m.size());
}
template <class F>
FMat<F> as_matrix(const std::vector<F>& v, int rows, int cols) {
    if (v.size() != static_cast<std::size_t>(rows) * cols) throw DimensionMismatch("as_matrix");
    return Eigen::Map<const FMat<F>>(v.data(), rows, cols);
}

namespace detail {

template <class F>
i128 lift(const F& x) {
    return x.to_i128();
}

// Residue r in [-zeta/2, zeta/2) checked against the residue table, directly when zeta is the
// table domain and as two shifted requests when it is smaller.
template <class B>
void residue_check(Tape<B>& t, int r, int zeta_bits, const std::string& where) {
    using F = typename B::F;
    const int db = t.qp().domain_bits;
    const auto tab = static_cast<std::size_t>(TableId::Residue);
    if (zeta_bits > db) throw ConfigInvalid("rescale factor exceeds the table domain");
    if (zeta_bits == db) {
        t.lookup(tab, {{F::one(), r}}, F::zero(), {}, F::zero(), where + ".residue");
        return;
    }
    const std::int64_t shift = (std::int64_t{1} << (db - 1)) - (std::int64_t{1} << (zeta_bits - 1));
    t.lookup(tab, {{F::one(), r}}, F::from_i64(-shift), {}, F::zero(), where + ".residue_lo");
    t.lookup(tab, {{F::one(), r}}, F::from_i64(shift), {}, F::zero(), where + ".residue_hi");
}

}  // namespace detail

// Digits of a shifted softmax exponent e = sum_k d_k 2^(weight_bits(k)).
inline std::vector<std::int64_t> radix_digits(i128 e, const QuantParams& q) {
    if (e < 0 || e >= (i128{1} << q.radix_total_bits())) throw DigitOutOfRange("softmax exponent outside the radix range");
    std::vector<std::int64_t> d;
    for (int k = 0; k < q.K(); ++k)
        d.push_back(static_cast<std::int64_t>((e >> q.weight_bits(k)) & ((i128{1} << q.radix_bits[k]) - 1)));
    return d;
}

// ---- primitive gadgets ----

template <class B>
int g_matmul(Tape<B>& t, int a, int b, const std::string& where) {
    using F = typename B::F;
    GadgetScope<B> s(t, GadgetKind::MatMul, where);
    if (t.cols(a) != t.rows(b)) throw ShapeMismatch("matmul: " + where);
    std::vector<F> out;
    if (t.prover()) {
        FMat<F> c = as_matrix(t.val(a), t.rows(a), t.cols(a)) * as_matrix(t.val(b), t.rows(b), t.cols(b));
        out = flatten(c);
    }
    int c = t.tensor(where, t.rows(a), t.cols(b), std::move(out));
    t.matmul(a, b, c, where);
    return c;
}

// out = sum_k coef_k T_k
template <class B>
int g_matadd(Tape<B>& t, const std::vector<std::pair<typename B::F, int>>& terms, const std::string& where) {
    using F = typename B::F;
    GadgetScope<B> s(t, GadgetKind::MatAdd, where);
    const int id0 = terms.at(0).second;
    std::vector<F> out;
    if (t.prover()) {
        out.assign(t.val(id0).size(), F::zero());
        for (const auto& [c, id] : terms) {
            const auto& v = t.val(id);
            if (v.size() != out.size()) throw ShapeMismatch("matadd: " + where);
            for (std::size_t i = 0; i < v.size(); ++i) out[i] += c * v[i];
        }
    }
    int o = t.tensor(where, t.rows(id0), t.cols(id0), std::move(out));
    auto lin = terms;
    lin.emplace_back(-F::one(), o);
    t.zero(std::move(lin), F::zero(), where);
    return o;
}

template <class B>
int g_hadamard(Tape<B>& t, int a, int b, const std::string& where) {
    using F = typename B::F;
    GadgetScope<B> s(t, GadgetKind::ElementProd, where);
    std::vector<F> out;
    if (t.prover()) {
        const auto &x = t.val(a), &y = t.val(b);
        if (x.size() != y.size()) throw ShapeMismatch("elementprod: " + where);
        out.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
    }
    int c = t.tensor(where, t.rows(a), t.cols(a), std::move(out));
    t.hadamard(a, b, c, where);
    return c;
}

template <class B>
int g_transpose(Tape<B>& t, int a, const std::string& where) {
    using F = typename B::F;
    GadgetScope<B> s(t, GadgetKind::Transpose, where);
    std::vector<F> out;
    if (t.prover()) {
        FMat<F> m = as_matrix(t.val(a), t.rows(a), t.cols(a)).transpose();
        out = flatten(m);
    }
    int at = t.tensor(where, t.cols(a), t.rows(a), std::move(out));
    t.transpose(a, at, where);
    return at;
}

// ---- composite gadgets ----

// narrow = round-half-up(wide / 2^zeta_bits), with the quotient split into two table limbs.
template <class B>
int g_rescale(Tape<B>& t, int wide, int zeta_bits, const std::string& where) {
    using F = typename B::F;
    GadgetScope<B> s(t, GadgetKind::Rescale, where);
    const int db = t.qp().domain_bits;
    const int rows = t.rows(wide), cols = t.cols(wide);
    std::vector<F> n, r, hi, lo;
    if (t.prover()) {
        const auto& w = t.val(wide);
        const i128 half = i128{1} << (zeta_bits - 1);
        const i128 bound = i128{1} << (2 * db - 1);
        const i128 limb_half = i128{1} << (db - 1);
        for (const auto& x : w) {
            i128 v = detail::lift(x);
            i128 q = (v + half) >> zeta_bits;
            if (q < -bound || q >= bound) throw RangeViolation("rescale: quotient outside two table limbs at " + where);
            i128 h = (q + limb_half) >> db;
            n.push_back(F::from_i128(q));
            r.push_back(F::from_i128(v - (q << zeta_bits)));
            hi.push_back(F::from_i128(h));
            lo.push_back(F::from_i128(q - (h << db)));
        }
    }
    const int nid = t.tensor(where, rows, cols, std::move(n));
    const int rid = t.tensor(where + ".r", rows, cols, std::move(r));
    const int hid = t.tensor(where + ".hi", rows, cols, std::move(hi));
    const int lid = t.tensor(where + ".lo", rows, cols, std::move(lo));
    t.zero({{F::one(), wide}, {-pow2<F>(zeta_bits), nid}, {-F::one(), rid}}, F::zero(), where + ".quotient");
    t.zero({{F::one(), nid}, {-pow2<F>(db), hid}, {-F::one(), lid}}, F::zero(), where + ".limbs");
    const auto quant = static_cast<std::size_t>(TableId::Quant);
    t.lookup(quant, {{F::one(), hid}}, F::zero(), {}, F::zero(), where + ".hi");
    t.lookup(quant, {{F::one(), lid}}, F::zero(), {}, F::zero(), where + ".lo");
    detail::residue_check(t, rid, zeta_bits, where);
    return nid;
}

namespace detail {

// Shared shape of SwiGLU and rsqrt: x' = round(x / zeta) in the table domain, y = f(x').
template <class B>
int quantized_activation(Tape<B>& t, int x, TableId table, int zeta_bits, std::int64_t domain_lo,
                         const std::string& where) {
    using F = typename B::F;
    const int rows = t.rows(x), cols = t.cols(x);
    std::vector<F> xq, r, y;
    if (t.prover()) {
        const i128 half = i128{1} << (zeta_bits - 1);
        for (const auto& e : t.val(x)) {
            i128 v = lift(e);
            i128 q = (v + half) >> zeta_bits;
            if (q < domain_lo || q >= domain_lo + t.qp().domain())
                throw RangeViolation(t.tables().get(table).name() + ": input outside the table domain at " + where);
            xq.push_back(F::from_i128(q));
            r.push_back(F::from_i128(v - (q << zeta_bits)));
            y.push_back(F::from_i64(t.tables().apply(table, static_cast<std::int64_t>(q))));
        }
    }
    const int qid = t.tensor(where + ".in", rows, cols, std::move(xq));
    const int rid = t.tensor(where + ".r", rows, cols, std::move(r));
    const int yid = t.tensor(where, rows, cols, std::move(y));
    t.zero({{F::one(), x}, {-pow2<F>(zeta_bits), qid}, {-F::one(), rid}}, F::zero(), where + ".quotient");
    t.lookup(static_cast<std::size_t>(table), {{F::one(), qid}}, F::zero(), {{F::one(), yid}}, F::zero(),
             where + ".activation");
    const std::int64_t to_quant = -domain_lo - t.qp().domain() / 2;
    t.lookup(static_cast<std::size_t>(TableId::Quant), {{F::one(), qid}}, F::from_i64(to_quant), {}, F::zero(),
             where + ".quantization");
    residue_check(t, rid, zeta_bits, where);
    return yid;
}

}  // namespace detail

// g = silu(z) or silu'(z) at scale gamma, input z at scale gamma.
template <class B>
int g_swiglu(Tape<B>& t, int z, bool derivative, const std::string& where) {
    GadgetScope<B> s(t, GadgetKind::SwiGLU, where);
    return detail::quantized_activation(t, z, derivative ? TableId::SiluPrime : TableId::Silu,
                                        t.qp().swiglu_zeta_bits, -t.qp().domain() / 2, where);
}

// u = 1 / sqrt(v + eps) at scale gamma, v >= 0 at scale gamma.
template <class B>
int g_rsqrt(Tape<B>& t, int v, const std::string& where) {
    GadgetScope<B> s(t, GadgetKind::Rsqrt, where);
    return detail::quantized_activation(t, v, TableId::Rsqrt, t.qp().rsqrt_zeta_bits, 0, where);
}

// Row-wise softmax of z (scale gamma) over all columns, output at scale gamma. The per-row
// offset xi' is a witness; the row sums pin it within the normalization budget.
template <class B>
int g_softmax(Tape<B>& t, int z, int real_rows, const std::string& where) {
    using F = typename B::F;
    GadgetScope<B> s(t, GadgetKind::Softmax, where);
    const auto& q = t.qp();
    const int R = t.rows(z), C = t.cols(z), K = q.K();
    const int xb = q.xi_bits();
    if (real_rows < 1 || real_rows > R) throw ShapeMismatch("softmax: real rows");

    std::vector<F> xi;
    std::vector<std::vector<F>> digits(K), ys(K);
    if (t.prover()) {
        const auto& zv = t.val(z);
        for (int i = 0; i < R; ++i) {
            i128 zmax = detail::lift(zv[static_cast<std::size_t>(i) * C]);
            for (int j = 1; j < C; ++j) zmax = std::max(zmax, detail::lift(zv[static_cast<std::size_t>(i) * C + j]));
            long double acc = 0;
            for (int j = 0; j < C; ++j) {
                long double d = static_cast<long double>(detail::lift(zv[static_cast<std::size_t>(i) * C + j]) - zmax);
                acc += std::exp(std::ldexp(d, -q.gamma_bits));
            }
            const i128 off = static_cast<i128>(std::roundl(std::ldexp(std::log(acc), q.exp_scale_bits)));
            const i128 x = (zmax << xb) + off;
            xi.push_back(F::from_i128(x));
            for (int j = 0; j < C; ++j) {
                const i128 e = x - (detail::lift(zv[static_cast<std::size_t>(i) * C + j]) << xb);
                const auto d = radix_digits(e, q);
                for (int k = 0; k < K; ++k) {
                    digits[k].push_back(F::from_i64(d[k]));
                    ys[k].push_back(F::from_i64(t.tables().apply_exp(k, d[k])));
                }
            }
        }
    }
    const int xid = t.tensor(where + ".xi", R, 1, std::move(xi));
    const int ones = t.public_tensor(where + ".ones", 1, C, std::vector<F>(static_cast<std::size_t>(C), F::one()));
    std::vector<F> bcast;
    if (t.prover()) {
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < C; ++j) bcast.push_back(t.val(xid)[i]);
    }
    const int XI = t.tensor(where + ".xi_rows", R, C, std::move(bcast));
    t.matmul(xid, ones, XI, where + ".broadcast");

    std::vector<int> did(K), yid(K);
    std::vector<typename Tape<B>::Term> decomp{{pow2<F>(xb), z}, {-F::one(), XI}};
    for (int k = 0; k < K; ++k) {
        did[k] = t.tensor(where + ".d" + std::to_string(k), R, C, std::move(digits[k]));
        yid[k] = t.tensor(where + ".y" + std::to_string(k), R, C, std::move(ys[k]));
        decomp.emplace_back(pow2<F>(q.weight_bits(k)), did[k]);
    }
    t.zero(std::move(decomp), F::zero(), where + ".decomposition", true);
    for (int k = 0; k < K; ++k)
        t.lookup(TableSet<F>::exp_index(k), {{F::one(), did[k]}}, F::zero(), {{F::one(), yid[k]}}, F::zero(),
                 where + ".exp" + std::to_string(k));

    int p = yid[K - 1];
    for (int k = K - 2; k >= 0; --k) {
        const std::string w = where + ".prod" + std::to_string(k);
        int h = g_hadamard(t, p, yid[k], w + ".wide");
        p = g_rescale(t, h, q.gamma_bits, w);
    }

    const std::int64_t target = q.gamma();
    const std::int64_t budget = static_cast<std::int64_t>(C) << std::max(0, q.gamma_bits - 12);
    if (t.prover()) {
        const auto& pv = t.val(p);
        for (int i = 0; i < real_rows; ++i) {
            i128 sum = 0;
            for (int j = 0; j < C; ++j) sum += detail::lift(pv[static_cast<std::size_t>(i) * C + j]);
            if (sum - target > budget || target - sum > budget)
                throw NormalizationBudgetExceeded("softmax row " + std::to_string(i) + " at " + where);
        }
    }
    t.rowsum(p, real_rows, target, budget, where + ".normalization");
    return p;
}

// ---- standalone gadget proofs ----

template <class B>
struct GadgetProof {
    GadgetKind kind = GadgetKind::MatMul;
    std::vector<std::int64_t> header;  // shapes and parameters, see gadget_header_size
    std::vector<Commitment<B>> commitments;
    TapeProof<B> proof;
};

inline std::size_t gadget_header_size(GadgetKind k) {
    switch (k) {
        case GadgetKind::MatMul: return 3;       // d0 d1 d2
        case GadgetKind::MatAdd:                 // rows cols
        case GadgetKind::ElementProd:
        case GadgetKind::Transpose:
        case GadgetKind::Rsqrt: return 2;
        case GadgetKind::SwiGLU: return 3;       // rows cols derivative
        case GadgetKind::Softmax: return 3;      // rows cols real_rows
        case GadgetKind::Rescale: return 3;      // rows cols zeta_bits
    }
    return 0;
}

namespace detail {

inline constexpr std::int64_t kMaxGadgetDim = 1 << 12;

inline void check_header(GadgetKind k, const std::vector<std::int64_t>& h) {
    if (h.size() != gadget_header_size(k)) throw ParseError("gadget header length");
    const std::size_t dims = k == GadgetKind::MatMul ? 3 : 2;
    for (std::size_t i = 0; i < dims; ++i)
        if (!is_pow2(h[i]) || h[i] > kMaxGadgetDim) throw ParseError("gadget dimension");
}

// Builds the statement list for one standalone gadget. in holds prover inputs, empty for the verifier.
template <class B>
int build_gadget(Tape<B>& t, GadgetKind k, const std::vector<std::int64_t>& h,
                 const std::vector<FMat<typename B::F>>& in) {
    using F = typename B::F;
    check_header(k, h);
    auto input = [&](std::size_t i, const char* name, std::int64_t r, std::int64_t c) {
        std::vector<F> v;
        if (t.prover()) {
            if (in.at(i).rows() != r || in.at(i).cols() != c) throw ShapeMismatch(std::string("gadget input ") + name);
            v = flatten(in[i]);
        }
        return t.tensor(name, static_cast<int>(r), static_cast<int>(c), std::move(v));
    };
    const std::string w = gadget_name(k);
    switch (k) {
        case GadgetKind::MatMul: {
            int a = input(0, "A", h[0], h[1]), b = input(1, "B", h[1], h[2]), c = input(2, "C", h[0], h[2]);
            GadgetScope<B> s(t, k, w);
            t.matmul(a, b, c, w);
            return c;
        }
        case GadgetKind::MatAdd: {
            int a = input(0, "A", h[0], h[1]), b = input(1, "B", h[0], h[1]), c = input(2, "C", h[0], h[1]);
            GadgetScope<B> s(t, k, w);
            t.zero({{F::one(), a}, {F::one(), b}, {-F::one(), c}}, F::zero(), w);
            return c;
        }
        case GadgetKind::ElementProd: {
            int a = input(0, "A", h[0], h[1]), b = input(1, "B", h[0], h[1]), c = input(2, "C", h[0], h[1]);
            GadgetScope<B> s(t, k, w);
            t.hadamard(a, b, c, w);
            return c;
        }
        case GadgetKind::Transpose: {
            int a = input(0, "A", h[0], h[1]), at = input(1, "At", h[1], h[0]);
            GadgetScope<B> s(t, k, w);
            t.transpose(a, at, w);
            return at;
        }
        case GadgetKind::Rescale: {
            if (h[2] < 1 || h[2] > t.qp().domain_bits) throw ParseError("rescale factor");
            return g_rescale(t, input(0, "X", h[0], h[1]), static_cast<int>(h[2]), w);
        }
        case GadgetKind::SwiGLU: {
            if (h[2] != 0 && h[2] != 1) throw ParseError("swiglu mode");
            return g_swiglu(t, input(0, "Z", h[0], h[1]), h[2] == 1, w);
        }
        case GadgetKind::Rsqrt: return g_rsqrt(t, input(0, "V", h[0], h[1]), w);
        case GadgetKind::Softmax: {
            if (h[2] < 1 || h[2] > h[0]) throw ParseError("softmax rows");
            return g_softmax(t, input(0, "Z", h[0], h[1]), static_cast<int>(h[2]), w);
        }
    }
    throw ParseError("gadget kind");
}

template <class B>
void absorb_gadget_header(Transcript& tr, GadgetKind k, const std::vector<std::int64_t>& h) {
    tr.append_u64("gadget.kind", static_cast<std::uint64_t>(k));
    for (auto x : h) tr.append_u64("gadget.header", static_cast<std::uint64_t>(x));
}

}  // namespace detail

template <class B>
struct GadgetResult {
    GadgetProof<B> proof;
    FMat<typename B::F> output;
};

// tamper edits witnesses before commitment; lookups then skip the multiplicity check so tests
// can produce proofs of false statements.
template <class B, class Rng>
GadgetResult<B> prove_gadget(const CommitmentKey<B>& key, const TableSet<typename B::F>& tables, GadgetKind k,
                             std::vector<std::int64_t> header, const std::vector<FMat<typename B::F>>& inputs,
                             Transcript& tr, Rng& rng, const std::function<void(Tape<B>&)>& tamper = {}) {
    Tape<B> t(tables, true);
    const int out = detail::build_gadget(t, k, header, inputs);
    if (tamper) tamper(t);
    t.commit_all(key, rng);
    detail::absorb_gadget_header<B>(tr, k, header);
    t.absorb(tr);
    GadgetResult<B> r;
    r.proof.kind = k;
    r.proof.header = std::move(header);
    r.proof.commitments = t.fresh_commitments();
    r.proof.proof = t.prove(key, tr, rng, static_cast<bool>(tamper));
    r.output = as_matrix(t.val(out), t.rows(out), t.cols(out));
    return r;
}

template <class B>
bool verify_gadget(const CommitmentKey<B>& key, const TableSet<typename B::F>& tables, const GadgetProof<B>& pf,
                   Transcript& tr, std::string* where = nullptr, std::uint64_t acc_seed = std::random_device{}()) {
    Tape<B> t(tables, false);
    try {
        detail::build_gadget(t, pf.kind, pf.header, {});
    } catch (const Error& e) {
        if (where) *where = std::string("header: ") + e.what();
        return false;
    }
    if (!t.set_fresh_commitments(pf.commitments)) {
        if (where) *where = "commitments";
        return false;
    }
    detail::absorb_gadget_header<B>(tr, pf.kind, pf.header);
    MsmAccumulator<B> acc(key, acc_seed);
    try {
        t.absorb(tr);
        if (!t.verify(key, pf.proof, tr, acc, where)) return false;
        return acc.finalize(where);
    } catch (const ParseError& e) {
        if (where) *where = e.what();
        return false;
    }
}

template <class B, class Rng>
GadgetProof<B> prove_matmul(const CommitmentKey<B>& key, const TableSet<typename B::F>& tables,
                            const FMat<typename B::F>& A, const FMat<typename B::F>& Bm,
                            const FMat<typename B::F>& C, Transcript& tr, Rng& rng) {
    return prove_gadget(key, tables, GadgetKind::MatMul, {A.rows(), A.cols(), Bm.cols()}, {A, Bm, C}, tr, rng).proof;
}
template <class B, class Rng>
GadgetProof<B> prove_matadd(const CommitmentKey<B>& key, const TableSet<typename B::F>& tables,
                            const FMat<typename B::F>& A, const FMat<typename B::F>& Bm,
                            const FMat<typename B::F>& C, Transcript& tr, Rng& rng) {
    return prove_gadget(key, tables, GadgetKind::MatAdd, {A.rows(), A.cols()}, {A, Bm, C}, tr, rng).proof;
}
template <class B, class Rng>
GadgetProof<B> prove_elementprod(const CommitmentKey<B>& key, const TableSet<typename B::F>& tables,
                                 const FMat<typename B::F>& A, const FMat<typename B::F>& Bm,
                                 const FMat<typename B::F>& C, Transcript& tr, Rng& rng) {
    return prove_gadget(key, tables, GadgetKind::ElementProd, {A.rows(), A.cols()}, {A, Bm, C}, tr, rng).proof;
}
template <class B, class Rng>
GadgetProof<B> prove_transpose(const CommitmentKey<B>& key, const TableSet<typename B::F>& tables,
                               const FMat<typename B::F>& A, const FMat<typename B::F>& At, Transcript& tr, Rng& rng) {
    return prove_gadget(key, tables, GadgetKind::Transpose, {A.rows(), A.cols()}, {A, At}, tr, rng).proof;
}
template <class B, class Rng>
GadgetResult<B> prove_rescale(const CommitmentKey<B>& key, const TableSet<typename B::F>& tables,
                              const FMat<typename B::F>& X, int zeta_bits, Transcript& tr, Rng& rng) {
    return prove_gadget(key, tables, GadgetKind::Rescale, {X.rows(), X.cols(), zeta_bits}, {X}, tr, rng);
}
template <class B, class Rng>
GadgetResult<B> prove_swiglu(const CommitmentKey<B>& key, const TableSet<typename B::F>& tables,
                             const FMat<typename B::F>& Z, bool derivative, Transcript& tr, Rng& rng) {
    return prove_gadget(key, tables, GadgetKind::SwiGLU, {Z.rows(), Z.cols(), derivative ? 1 : 0}, {Z}, tr, rng);
}
template <class B, class Rng>
GadgetResult<B> prove_rsqrt(const CommitmentKey<B>& key, const TableSet<typename B::F>& tables,
                            const FMat<typename B::F>& V, Transcript& tr, Rng& rng) {
    return prove_gadget(key, tables, GadgetKind::Rsqrt, {V.rows(), V.cols()}, {V}, tr, rng);
}
template <class B, class Rng>
GadgetResult<B> prove_softmax(const CommitmentKey<B>& key, const TableSet<typename B::F>& tables,
                              const FMat<typename B::F>& Z, Transcript& tr, Rng& rng) {
    return prove_gadget(key, tables, GadgetKind::Softmax, {Z.rows(), Z.cols(), Z.rows()}, {Z}, tr, rng);
}

}  // namespace zkl
