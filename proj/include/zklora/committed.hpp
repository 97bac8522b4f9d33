#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyrax.hpp"

namespace zkl {

// A committed multilinear table. Prover side keeps the table and row blinds; a public tensor
// is committed with zero blinding and its table is known to the verifier as well.
template <class B>
struct Committed {
    using F = typename B::F;
    Commitment<B> com;
    std::vector<F> table;
    std::vector<F> blinds;
    bool is_public = false;

    int num_vars() const { return com.num_vars; }

    template <class Rng>
    static Committed make(const CommitmentKey<B>& key, std::vector<F> t, Rng& rng) {
        Committed c;
        c.table = std::move(t);
        const int n = log2_exact(static_cast<std::int64_t>(c.table.size()));
        c.blinds = random_blinds<B>(n, rng);
        c.com = commit<B>(key, c.table, c.blinds);
        return c;
    }
    static Committed make_public(const CommitmentKey<B>& key, std::vector<F> t) {
        Committed c;
        c.table = std::move(t);
        c.com = commit<B>(key, c.table, {});
        c.is_public = true;
        return c;
    }
    // Verifier-side handle carrying only the commitment.
    static Committed from_commitment(Commitment<B> com) {
        Committed c;
        c.com = std::move(com);
        return c;
    }
};

template <class B>
struct LinTerm {
    typename B::F coef;
    const Committed<B>* t;
};

// sum_k coef_k * T_k + constant, elementwise over tensors of equal size.
template <class B>
struct LinForm {
    using F = typename B::F;
    std::vector<LinTerm<B>> terms;
    F constant = F::zero();

    bool empty() const { return terms.empty() && constant.is_zero(); }

    std::vector<F> values(std::size_t len) const {
        std::vector<F> v(len, constant);
        for (const auto& t : terms) {
            if (t.t->table.size() != len) throw DimensionMismatch("linear form: term length");
            for (std::size_t i = 0; i < len; ++i) v[i] += t.coef * t.t->table[i];
        }
        return v;
    }
};

// Opening of sum_k coef_k * T~_k(x). Public terms are left out of the Hyrax opening and
// evaluated directly by both sides; combination_value adds them back.
template <class B, class Rng>
OpeningProof<B> open_combination(const CommitmentKey<B>& key, std::span<const LinTerm<B>> terms,
                                 std::span<const typename B::F> x, Transcript& tr, Rng& rng) {
    using F = typename B::F;
    const std::size_t len = std::size_t{1} << x.size();
    std::vector<F> table(len, F::zero());
    std::vector<F> blinds(std::size_t{1} << row_vars(static_cast<int>(x.size())), F::zero());
    for (const auto& t : terms) {
        if (t.t->is_public) continue;
        if (t.t->table.size() != len) throw DimensionMismatch("open_combination: term length");
        for (std::size_t i = 0; i < len; ++i) table[i] += t.coef * t.t->table[i];
        if (!t.t->blinds.empty())
            for (std::size_t i = 0; i < blinds.size(); ++i) blinds[i] += t.coef * t.t->blinds[i];
    }
    return open<B>(key, table, blinds, x, tr, rng);
}

template <class B>
bool verify_combination(const CommitmentKey<B>& key, std::span<const LinTerm<B>> terms,
                        std::span<const typename B::F> x, const OpeningProof<B>& pf, Transcript& tr,
                        MsmAccumulator<B>& acc, std::string where) {
    std::vector<CommitTerm<B>> ct;
    for (const auto& t : terms) {
        if (t.t->num_vars() != static_cast<int>(x.size())) return false;
        if (!t.t->is_public) ct.push_back(CommitTerm<B>{t.coef, &t.t->com});
    }
    // nothing committed: the opening is of the zero table
    if (ct.empty() && !pf.y.is_zero()) return false;
    return verify_opening<B>(key, ct, x, pf, tr, acc, std::move(where));
}

template <class B>
typename B::F combination_value(std::span<const LinTerm<B>> terms, std::span<const typename B::F> x,
                                const OpeningProof<B>& pf) {
    auto v = pf.y;
    for (const auto& t : terms)
        if (t.t->is_public) v += t.coef * mle_eval<typename B::F>(t.t->table, x);
    return v;
}

}  // namespace zkl
