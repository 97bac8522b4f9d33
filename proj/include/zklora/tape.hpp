#pragma once

#include <chrono>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "committed.hpp"
#include "lookup.hpp"
#include "sumcheck.hpp"
#include "tables.hpp"

namespace zkl {

enum class GadgetKind : std::uint8_t {
    MatMul = 1,
    MatAdd = 2,
    ElementProd = 3,
    Transpose = 4,
    SwiGLU = 5,
    Softmax = 6,
    Rescale = 7,
    Rsqrt = 8,
};
inline constexpr int kGadgetKinds = 8;

inline const char* gadget_name(GadgetKind k) {
    switch (k) {
        case GadgetKind::MatMul: return "matmul";
        case GadgetKind::MatAdd: return "matadd";
        case GadgetKind::ElementProd: return "elementprod";
        case GadgetKind::Transpose: return "transpose";
        case GadgetKind::SwiGLU: return "swiglu";
        case GadgetKind::Softmax: return "softmax";
        case GadgetKind::Rescale: return "rescale";
        case GadgetKind::Rsqrt: return "rsqrt";
    }
    return "?";
}

// Primitive proof steps every gadget lowers to.
enum class StepKind : std::uint8_t {
    MatMul = 1,        // C = A B, one Eq4 sumcheck over the (u, w, v) cube
    Hadamard = 2,      // C = A o B, one Eq4 sumcheck
    Zero = 3,          // sum_k c_k T_k + const = 0, one combined opening at a random point
    ZeroSumcheck = 4,  // as Zero, through a product-of-two sumcheck with eq(rho, .)
    Transpose = 5,     // A'(j, i) = A(i, j), two openings at swapped points
    RowSum = 6,        // |sum_j P(i, j) - target| <= budget for each row, one opening per row
};

template <class B>
struct StepProof {
    SumcheckProof<typename B::F> sc;
    std::vector<OpeningProof<B>> openings;
};

template <class B>
struct TapeProof {
    std::vector<StepProof<B>> steps;
    std::vector<LookupProof<B>> lookups;  // tables with at least one request, in table order
};

struct TensorInfo {
    std::string name;
    int rows = 1, cols = 1;  // powers of two
    bool is_public = false;
    bool adopted = false;  // committed outside this tape
    int num_vars() const { return log2_exact(rows) + log2_exact(cols); }
};

// Soundness accounting: sumcheck rounds m, max degree, lookup-checked elements C.
struct BudgetCounts {
    std::uint64_t rounds = 0;
    int d_max = 0;
    std::uint64_t lookup_elements = 0;
    BudgetCounts& operator+=(const BudgetCounts& o) {
        rounds += o.rounds;
        d_max = std::max(d_max, o.d_max);
        lookup_elements += o.lookup_elements;
        return *this;
    }
    friend bool operator==(const BudgetCounts&, const BudgetCounts&) = default;
};

// A statement list over committed tensors, built identically by prover (with values) and
// verifier (shapes only), then proven or verified in order.
// Wall-clock seconds per statement and for all lookup batches, filled by Tape::prove on request.
struct ProveProfile {
    std::vector<double> step_seconds;
    double lookup_seconds = 0;
};

template <class B>
class Tape {
public:
    using F = typename B::F;
    using Term = std::pair<F, int>;

    struct Step {
        StepKind kind;
        int a = -1, b = -1, c = -1;
        std::vector<Term> lin;
        F constant = F::zero();
        std::int64_t target = 0, budget = 0;
        int real_rows = 0;
        std::string where;
    };
    struct LookupUse {
        std::size_t table;
        int num_vars;
        std::vector<Term> x, y;
        F xc = F::zero(), yc = F::zero();
        std::string where;
    };
    struct GadgetRecord {
        GadgetKind kind;
        std::string where;
    };

    Tape(const TableSet<F>& tables, bool prover) : tables_(&tables), prover_(prover) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool prover() const { return prover_; }
    const TableSet<F>& tables() const { return *tables_; }
    const QuantParams& qp() const { return tables_->params(); }

    // ---- tensors ----
    int tensor(std::string name, int rows, int cols, std::vector<F> values = {}) {
        return add(std::move(name), rows, cols, std::move(values), false);
    }
    int public_tensor(std::string name, int rows, int cols, std::vector<F> values) {
        if (values.size() != static_cast<std::size_t>(rows) * cols) throw DimensionMismatch("public tensor size");
        return add(std::move(name), rows, cols, std::move(values), true);
    }
    // Tensor committed elsewhere (frozen weights, adapters carried across epochs).
    int adopt(std::string name, int rows, int cols, const Committed<B>& c) {
        int id = add(std::move(name), rows, cols, {}, false);
        tensors_[id] = c;
        info_[id].adopted = true;
        if (c.com.num_vars != info_[id].num_vars()) throw DimensionMismatch("adopted commitment size");
        return id;
    }
    std::size_t num_tensors() const { return info_.size(); }
    const TensorInfo& info(int id) const { return info_.at(id); }
    int find(const std::string& name) const {
        for (std::size_t i = 0; i < info_.size(); ++i)
            if (info_[i].name == name) return static_cast<int>(i);
        throw PrecondViolation("no tensor named " + name);
    }
    int rows(int id) const { return info_.at(id).rows; }
    int cols(int id) const { return info_.at(id).cols; }
    const std::vector<F>& val(int id) const { return tensors_.at(id).table; }
    std::vector<F>& mutable_val(int id) { return tensors_.at(id).table; }
    const Committed<B>& committed(int id) const { return tensors_.at(id); }

    // ---- statements ----
    void matmul(int a, int b, int c, std::string where) {
        if (cols(a) != rows(b) || rows(c) != rows(a) || cols(c) != cols(b)) throw ShapeMismatch("matmul: " + where);
        steps_.push_back(Step{StepKind::MatMul, a, b, c, {}, F::zero(), 0, 0, 0, std::move(where)});
    }
    void hadamard(int a, int b, int c, std::string where) {
        same_shape(a, b, where);
        same_shape(a, c, where);
        steps_.push_back(Step{StepKind::Hadamard, a, b, c, {}, F::zero(), 0, 0, 0, std::move(where)});
    }
    void zero(std::vector<Term> lin, F constant, std::string where, bool via_sumcheck = false) {
        if (lin.empty()) throw PrecondViolation("zero: no terms");
        for (const auto& t : lin) same_shape(lin[0].second, t.second, where);
        steps_.push_back(Step{via_sumcheck ? StepKind::ZeroSumcheck : StepKind::Zero, -1, -1, -1, std::move(lin),
                              constant, 0, 0, 0, std::move(where)});
    }
    void transpose(int a, int at, std::string where) {
        if (rows(a) != cols(at) || cols(a) != rows(at)) throw ShapeMismatch("transpose: " + where);
        steps_.push_back(Step{StepKind::Transpose, a, at, -1, {}, F::zero(), 0, 0, 0, std::move(where)});
    }
    void rowsum(int p, int real_rows, std::int64_t target, std::int64_t budget, std::string where) {
        steps_.push_back(Step{StepKind::RowSum, p, -1, -1, {}, F::zero(), target, budget, real_rows, std::move(where)});
    }
    void lookup(std::size_t table, std::vector<Term> x, F xc, std::vector<Term> y, F yc, std::string where) {
        if (x.empty()) throw PrecondViolation("lookup: empty request");
        const int nv = info(x[0].second).num_vars();
        for (const auto* col : {&x, &y})
            for (const auto& t : *col)
                if (info(t.second).num_vars() != nv) throw ShapeMismatch("lookup: " + where);
        lookups_.push_back(LookupUse{table, nv, std::move(x), std::move(y), xc, yc, std::move(where)});
    }
    // Gadget nesting: only outermost gadgets are recorded in the schedule.
    void enter(GadgetKind k, const std::string& where) {
        if (depth_++ == 0) gadgets_.push_back(GadgetRecord{k, where});
    }
    void leave() { --depth_; }

    const std::vector<Step>& steps() const { return steps_; }
    const std::vector<LookupUse>& lookups() const { return lookups_; }
    const std::vector<GadgetRecord>& gadgets() const { return gadgets_; }

    // ---- commitments ----
    template <class Rng>
    void commit_all(const CommitmentKey<B>& key, Rng& rng) {
        for (std::size_t i = 0; i < info_.size(); ++i) {
            if (info_[i].adopted || info_[i].is_public) continue;
            auto& t = tensors_[i];
            if (t.table.size() != (std::size_t{1} << info_[i].num_vars()))
                throw PrecondViolation("commit: missing values for " + info_[i].name);
            t.blinds = random_blinds<B>(info_[i].num_vars(), rng);
            t.com = commit<B>(key, t.table, t.blinds);
        }
    }
    // Commitments produced by this tape (not adopted, not public), in tensor order.
    std::vector<Commitment<B>> fresh_commitments() const {
        std::vector<Commitment<B>> out;
        for (std::size_t i = 0; i < info_.size(); ++i)
            if (!info_[i].adopted && !info_[i].is_public) out.push_back(tensors_[i].com);
        return out;
    }
    std::size_t fresh_count() const {
        std::size_t n = 0;
        for (const auto& i : info_) n += !i.adopted && !i.is_public;
        return n;
    }
    bool set_fresh_commitments(std::vector<Commitment<B>> coms) {
        if (coms.size() != fresh_count()) return false;
        std::size_t k = 0;
        for (std::size_t i = 0; i < info_.size(); ++i) {
            if (info_[i].adopted || info_[i].is_public) continue;
            if (coms[k].num_vars != info_[i].num_vars() ||
                coms[k].rows.size() != (std::size_t{1} << row_vars(info_[i].num_vars())))
                return false;
            tensors_[i].com = std::move(coms[k++]);
        }
        return true;
    }
    void absorb(Transcript& tr) const {
        tr.append_u64("tape.tensors", info_.size());
        for (std::size_t i = 0; i < info_.size(); ++i) {
            if (info_[i].is_public) {
                tr.append_fields<F>("tape.public", tensors_[i].table);
            } else {
                tensors_[i].com.absorb(tr, "tape.com");
            }
        }
    }

    BudgetCounts budget() const {
        BudgetCounts b;
        for (const auto& s : steps_) {
            switch (s.kind) {
                case StepKind::MatMul:
                    b.rounds += info(s.a).num_vars() + log2_exact(cols(s.b));
                    b.d_max = std::max(b.d_max, 3);
                    break;
                case StepKind::Hadamard:
                    b.rounds += info(s.a).num_vars();
                    b.d_max = std::max(b.d_max, 3);
                    break;
                case StepKind::ZeroSumcheck:
                    b.rounds += info(s.lin[0].second).num_vars();
                    b.d_max = std::max(b.d_max, 2);
                    break;
                default: break;
            }
        }
        for (std::size_t t = 0; t < tables_->size(); ++t) {
            auto batch = make_batch(t);
            if (batch.empty()) continue;
            const int vars = batch.sumcheck_vars();
            b.rounds += vars;
            b.d_max = std::max(b.d_max, 3);
            b.lookup_elements += (std::uint64_t{1} << vars) + (*tables_)[t].size();
        }
        return b;
    }

    // ---- proving ----
    template <class Rng>
    TapeProof<B> prove(const CommitmentKey<B>& key, Transcript& tr, Rng& rng, bool lenient_lookups = false,
                       ProveProfile* prof = nullptr) const {
        using clock = std::chrono::steady_clock;
        auto secs = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };
        TapeProof<B> pf;
        for (std::size_t i = 0; i < steps_.size(); ++i) {
            const auto t0 = clock::now();
            Transcript st = tr.fork("tape.step", i);
            pf.steps.push_back(prove_step(key, steps_[i], st, rng));
            tr.merge("tape.step", st);
            if (prof) prof->step_seconds.push_back(secs(t0));
        }
        const auto t0 = clock::now();
        for (std::size_t t = 0; t < tables_->size(); ++t) {
            auto batch = make_batch(t);
            if (batch.empty()) continue;
            Transcript lt = tr.fork("tape.lookup", t);
            if (lenient_lookups)
                pf.lookups.push_back(batch.prove_with_multiplicities(key, lt, rng, lenient_multiplicities(batch)));
            else
                pf.lookups.push_back(batch.prove(key, lt, rng));
            tr.merge("tape.lookup", lt);
        }
        if (prof) prof->lookup_seconds += secs(t0);
        return pf;
    }

    bool verify(const CommitmentKey<B>& key, const TapeProof<B>& pf, Transcript& tr, MsmAccumulator<B>& acc,
                std::string* where = nullptr) const {
        auto fail = [&](const std::string& w) {
            if (where) *where = w;
            return false;
        };
        if (pf.steps.size() != steps_.size()) return fail("step count");
        try {
            for (std::size_t i = 0; i < steps_.size(); ++i) {
                Transcript st = tr.fork("tape.step", i);
                if (!verify_step(key, steps_[i], pf.steps[i], st, acc)) return fail(steps_[i].where);
                tr.merge("tape.step", st);
            }
            std::size_t li = 0;
            for (std::size_t t = 0; t < tables_->size(); ++t) {
                auto batch = make_batch(t);
                if (batch.empty()) continue;
                if (li >= pf.lookups.size()) return fail("lookup count");
                Transcript lt = tr.fork("tape.lookup", t);
                if (!batch.verify(key, pf.lookups[li++], lt, acc)) return fail("lookup " + (*tables_)[t].name());
                tr.merge("tape.lookup", lt);
            }
            if (li != pf.lookups.size()) return fail("lookup count");
        } catch (const ParseError& e) {
            return fail(std::string("parse: ") + e.what());
        }
        return true;
    }

    LookupBatch<B> make_batch(std::size_t t) const {
        LookupBatch<B> batch((*tables_)[t]);
        for (const auto& u : lookups_) {
            if (u.table != t) continue;
            LookupRequest<B> r;
            r.num_vars = u.num_vars;
            for (const auto& [c, id] : u.x) r.x.terms.push_back(LinTerm<B>{c, &tensors_[id]});
            for (const auto& [c, id] : u.y) r.y.terms.push_back(LinTerm<B>{c, &tensors_[id]});
            r.x.constant = u.xc;
            r.y.constant = u.yc;
            r.where = u.where;
            batch.add(std::move(r));
        }
        return batch;
    }

private:
    int add(std::string name, int rows, int cols, std::vector<F> values, bool is_public) {
        if (!is_pow2(rows) || !is_pow2(cols)) throw ShapeMismatch("tensor dims must be powers of two: " + name);
        TensorInfo ti{std::move(name), rows, cols, is_public, false};
        Committed<B> c;
        if (!values.empty() && values.size() != static_cast<std::size_t>(rows) * cols)
            throw DimensionMismatch("tensor values: " + ti.name);
        c.table = std::move(values);
        c.is_public = is_public;
        c.com.num_vars = ti.num_vars();
        info_.push_back(std::move(ti));
        tensors_.push_back(std::move(c));
        return static_cast<int>(info_.size()) - 1;
    }
    void same_shape(int a, int b, const std::string& where) const {
        if (rows(a) != rows(b) || cols(a) != cols(b)) throw ShapeMismatch(where);
    }

    std::vector<F> lenient_multiplicities(const LookupBatch<B>& batch) const {
        const auto& T = batch.table();
        std::vector<std::uint64_t> m(T.size(), 0);
        std::size_t used = 0;
        for (const auto& r : batch.requests()) {
            const std::size_t len = std::size_t{1} << r.num_vars;
            used += len;
            auto x = r.x.values(len);
            std::vector<F> y = T.paired() ? r.y.values(len) : std::vector<F>{};
            for (std::size_t i = 0; i < len; ++i) {
                auto j = T.index_of(x[i], T.paired() ? &y[i] : nullptr);
                if (j) ++m[*j];
            }
        }
        const std::size_t D = std::size_t{1} << batch.sumcheck_vars();
        m[0] += D - used;
        std::vector<F> out(T.size());
        for (std::size_t j = 0; j < T.size(); ++j) out[j] = F::from_u64(m[j]);
        return out;
    }

    // Openings of factor tensors at x; public tensors are evaluated by the verifier instead.
    template <class Rng>
    void open_factor(const CommitmentKey<B>& key, int id, std::span<const F> x, Transcript& tr, Rng& rng,
                     StepProof<B>& out) const {
        if (info_[id].is_public) return;
        const auto& t = tensors_[id];
        out.openings.push_back(open<B>(key, t.table, t.blinds, x, tr, rng));
    }
    bool check_factor(const CommitmentKey<B>& key, int id, std::span<const F> x, const StepProof<B>& pf,
                      std::size_t& k, Transcript& tr, MsmAccumulator<B>& acc, const std::string& where, F& value) const {
        if (info_[id].is_public) {
            value = mle_eval<F>(tensors_[id].table, x);
            return true;
        }
        if (k >= pf.openings.size()) return false;
        const auto& o = pf.openings[k++];
        if (!verify_opening<B>(key, tensors_[id].com, x, o, tr, acc, where)) return false;
        value = o.y;
        return true;
    }

    std::vector<LinTerm<B>> lin_terms(const Step& s) const {
        std::vector<LinTerm<B>> terms;
        for (const auto& [c, id] : s.lin) terms.push_back(LinTerm<B>{c, &tensors_[id]});
        return terms;
    }

    template <class Rng>
    StepProof<B> prove_step(const CommitmentKey<B>& key, const Step& s, Transcript& tr, Rng& rng) const {
        StepProof<B> pf;
        switch (s.kind) {
            case StepKind::MatMul: {
                const int d0 = rows(s.a), d1 = cols(s.a), d2 = cols(s.b);
                const int n0 = log2_exact(d0), n1 = log2_exact(d1), n2 = log2_exact(d2);
                auto ru = tr.challenges<F>("mm.rho_u", n0);
                auto rv = tr.challenges<F>("mm.rho_v", n2);
                auto eu = eq_table<F>(ru), ev = eq_table<F>(rv);
                const auto &A = val(s.a), &Bm = val(s.b), &C = val(s.c);
                const std::size_t len = static_cast<std::size_t>(d0) * d1 * d2;
                std::vector<std::vector<F>> f(4, std::vector<F>(len));
                for (int u = 0; u < d0; ++u)
                    for (int w = 0; w < d1; ++w)
                        for (int v = 0; v < d2; ++v) {
                            const std::size_t x = (static_cast<std::size_t>(u) * d1 + w) * d2 + v;
                            f[0][x] = eu[u] * ev[v];
                            f[1][x] = A[static_cast<std::size_t>(u) * d1 + w];
                            f[2][x] = Bm[static_cast<std::size_t>(w) * d2 + v];
                            f[3][x] = C[static_cast<std::size_t>(u) * d2 + v];
                        }
                ShapeConsts<F> k;
                k.c = F::from_u64(d1).inverse();
                SumcheckOutput<F> out;
                pf.sc = prove_sumcheck<F>(Shape::Eq4, std::move(f), k, F::zero(), tr, out);
                auto [pa, pb, pc] = matmul_points(out.point, n0, n1, n2);
                open_factor(key, s.a, pa, tr, rng, pf);
                open_factor(key, s.b, pb, tr, rng, pf);
                open_factor(key, s.c, pc, tr, rng, pf);
                break;
            }
            case StepKind::Hadamard: {
                const int n = info(s.a).num_vars();
                auto rho = tr.challenges<F>("had.rho", n);
                std::vector<std::vector<F>> f{eq_table<F>(rho), val(s.a), val(s.b), val(s.c)};
                ShapeConsts<F> k;
                k.c = F::one();
                SumcheckOutput<F> out;
                pf.sc = prove_sumcheck<F>(Shape::Eq4, std::move(f), k, F::zero(), tr, out);
                for (int id : {s.a, s.b, s.c}) open_factor(key, id, out.point, tr, rng, pf);
                break;
            }
            case StepKind::Zero: {
                const int n = info(s.lin[0].second).num_vars();
                auto rho = tr.challenges<F>("zero.rho", n);
                auto terms = lin_terms(s);
                pf.openings.push_back(open_combination<B>(key, terms, rho, tr, rng));
                break;
            }
            case StepKind::ZeroSumcheck: {
                const int n = info(s.lin[0].second).num_vars();
                auto rho = tr.challenges<F>("zero.rho", n);
                auto terms = lin_terms(s);
                LinForm<B> form{terms, s.constant};
                std::vector<std::vector<F>> f{eq_table<F>(rho), form.values(std::size_t{1} << n)};
                SumcheckOutput<F> out;
                pf.sc = prove_sumcheck<F>(Shape::ProductOfTwo, std::move(f), {}, F::zero(), tr, out);
                pf.openings.push_back(open_combination<B>(key, terms, out.point, tr, rng));
                break;
            }
            case StepKind::Transpose: {
                const int ni = log2_exact(rows(s.a)), nj = log2_exact(cols(s.a));
                auto ri = tr.challenges<F>("tr.rho_i", ni);
                auto rj = tr.challenges<F>("tr.rho_j", nj);
                auto pa = concat(ri, rj), pt = concat(rj, ri);
                open_factor(key, s.a, pa, tr, rng, pf);
                open_factor(key, s.b, pt, tr, rng, pf);
                break;
            }
            case StepKind::RowSum: {
                for (int i = 0; i < s.real_rows; ++i) open_factor(key, s.a, row_point(s.a, i), tr, rng, pf);
                break;
            }
        }
        return pf;
    }

    bool verify_step(const CommitmentKey<B>& key, const Step& s, const StepProof<B>& pf, Transcript& tr,
                     MsmAccumulator<B>& acc) const {
        std::size_t k = 0;
        const std::string& w = s.where;
        switch (s.kind) {
            case StepKind::MatMul: {
                const int d1 = cols(s.a);
                const int n0 = log2_exact(rows(s.a)), n1 = log2_exact(d1), n2 = log2_exact(cols(s.b));
                auto ru = tr.challenges<F>("mm.rho_u", n0);
                auto rv = tr.challenges<F>("mm.rho_v", n2);
                std::vector<F> r;
                F fin;
                if (!verify_sumcheck_rounds<F>(n0 + n1 + n2, 3, F::zero(), pf.sc, tr, r, fin)) return false;
                auto [pa, pb, pc] = matmul_points(r, n0, n1, n2);
                F va, vb, vc;
                if (!check_factor(key, s.a, pa, pf, k, tr, acc, w, va)) return false;
                if (!check_factor(key, s.b, pb, pf, k, tr, acc, w, vb)) return false;
                if (!check_factor(key, s.c, pc, pf, k, tr, acc, w, vc)) return false;
                if (k != pf.openings.size()) return false;
                std::span<const F> rs(r);
                F e = eq_eval<F>(ru, rs.subspan(0, n0)) * eq_eval<F>(rv, rs.subspan(n0 + n1));
                ShapeConsts<F> c;
                c.c = F::from_u64(d1).inverse();
                std::vector<F> v{e, va, vb, vc};
                return combine<F>(Shape::Eq4, v, c) == fin;
            }
            case StepKind::Hadamard: {
                const int n = info(s.a).num_vars();
                auto rho = tr.challenges<F>("had.rho", n);
                std::vector<F> r;
                F fin;
                if (!verify_sumcheck_rounds<F>(n, 3, F::zero(), pf.sc, tr, r, fin)) return false;
                std::vector<F> v{eq_eval<F>(rho, r), F::zero(), F::zero(), F::zero()};
                if (!check_factor(key, s.a, r, pf, k, tr, acc, w, v[1])) return false;
                if (!check_factor(key, s.b, r, pf, k, tr, acc, w, v[2])) return false;
                if (!check_factor(key, s.c, r, pf, k, tr, acc, w, v[3])) return false;
                if (k != pf.openings.size()) return false;
                ShapeConsts<F> c;
                c.c = F::one();
                return combine<F>(Shape::Eq4, v, c) == fin;
            }
            case StepKind::Zero: {
                const int n = info(s.lin[0].second).num_vars();
                auto rho = tr.challenges<F>("zero.rho", n);
                if (pf.openings.size() != 1 || !pf.sc.rounds.empty()) return false;
                auto terms = lin_terms(s);
                if (!verify_combination<B>(key, terms, rho, pf.openings[0], tr, acc, w)) return false;
                return (combination_value<B>(terms, rho, pf.openings[0]) + s.constant).is_zero();
            }
            case StepKind::ZeroSumcheck: {
                const int n = info(s.lin[0].second).num_vars();
                auto rho = tr.challenges<F>("zero.rho", n);
                if (pf.openings.size() != 1) return false;
                std::vector<F> r;
                F fin;
                if (!verify_sumcheck_rounds<F>(n, 2, F::zero(), pf.sc, tr, r, fin)) return false;
                auto terms = lin_terms(s);
                if (!verify_combination<B>(key, terms, r, pf.openings[0], tr, acc, w)) return false;
                F l = combination_value<B>(terms, r, pf.openings[0]) + s.constant;
                return eq_eval<F>(rho, r) * l == fin;
            }
            case StepKind::Transpose: {
                const int ni = log2_exact(rows(s.a)), nj = log2_exact(cols(s.a));
                auto ri = tr.challenges<F>("tr.rho_i", ni);
                auto rj = tr.challenges<F>("tr.rho_j", nj);
                auto pa = concat(ri, rj), pt = concat(rj, ri);
                if (!pf.sc.rounds.empty()) return false;
                F va, vt;
                if (!check_factor(key, s.a, pa, pf, k, tr, acc, w, va)) return false;
                if (!check_factor(key, s.b, pt, pf, k, tr, acc, w, vt)) return false;
                return k == pf.openings.size() && va == vt;
            }
            case StepKind::RowSum: {
                if (!pf.sc.rounds.empty()) return false;
                const F scale = F::from_u64(static_cast<std::uint64_t>(cols(s.a)));
                for (int i = 0; i < s.real_rows; ++i) {
                    F v;
                    if (!check_factor(key, s.a, row_point(s.a, i), pf, k, tr, acc, w, v)) return false;
                    F diff = v * scale - F::from_i64(s.target);
                    if (!within(diff, s.budget)) return false;
                }
                return k == pf.openings.size();
            }
        }
        return false;
    }

    static bool within(const F& diff, std::int64_t budget) {
        try {
            i128 d = diff.to_i128();
            return d <= budget && d >= -static_cast<i128>(budget);
        } catch (const std::range_error&) {
            return false;
        }
    }

    std::vector<F> row_point(int p, int i) const {
        const int nr = log2_exact(rows(p)), nc = log2_exact(cols(p));
        std::vector<F> x;
        for (int b = nr - 1; b >= 0; --b) x.push_back((i >> b) & 1 ? F::one() : F::zero());
        const F half = F::from_u64(2).inverse();
        for (int b = 0; b < nc; ++b) x.push_back(half);
        return x;
    }
    static std::vector<F> concat(const std::vector<F>& a, const std::vector<F>& b) {
        std::vector<F> r(a);
        r.insert(r.end(), b.begin(), b.end());
        return r;
    }
    static std::tuple<std::vector<F>, std::vector<F>, std::vector<F>> matmul_points(const std::vector<F>& r, int n0,
                                                                                      int n1, int n2) {
        std::vector<F> ru(r.begin(), r.begin() + n0), rw(r.begin() + n0, r.begin() + n0 + n1),
            rv(r.begin() + n0 + n1, r.begin() + n0 + n1 + n2);
        return {concat(ru, rw), concat(rw, rv), concat(ru, rv)};
    }

    const TableSet<F>* tables_;
    bool prover_;
    std::vector<TensorInfo> info_;
    std::deque<Committed<B>> tensors_;
    std::vector<Step> steps_;
    std::vector<LookupUse> lookups_;
    std::vector<GadgetRecord> gadgets_;
    int depth_ = 0;
};

template <class B>
struct GadgetScope {
    Tape<B>& t;
    GadgetScope(Tape<B>& tape, GadgetKind k, const std::string& where) : t(tape) { t.enter(k, where); }
    ~GadgetScope() { t.leave(); }
    GadgetScope(const GadgetScope&) = delete;
    GadgetScope& operator=(const GadgetScope&) = delete;
};

}  // namespace zkl
