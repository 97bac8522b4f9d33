#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "errors.hpp"
#include "hyrax.hpp"
#include "transcript.hpp"

namespace zkl {

// Supported combination rules over the factor values v[k]:
//   ProductOfTwo  v0 * v1
//   Eq4           v0 * v1 * v2 - c * v0 * v3
//   Eq7           alpha*v0*v1*(v2 + beta) + v0 + nd*alpha^2*v3*v4*(v5 + beta) - nd*v3*v6
enum class Shape : std::uint8_t { ProductOfTwo = 1, Eq4 = 2, Eq7 = 3 };

inline int shape_degree(Shape s) { return s == Shape::ProductOfTwo ? 2 : 3; }
inline int shape_factors(Shape s) {
    switch (s) {
        case Shape::ProductOfTwo: return 2;
        case Shape::Eq4: return 4;
        case Shape::Eq7: return 7;
    }
    return 0;
}

template <class F>
struct ShapeConsts {
    F c = F::zero();
    F alpha = F::zero();
    F beta = F::zero();
    F nd = F::zero();
};

template <Shape S, class F>
inline F combine_t(const F* v, const ShapeConsts<F>& k) {
    if constexpr (S == Shape::ProductOfTwo) {
        return v[0] * v[1];
    } else if constexpr (S == Shape::Eq4) {
        return v[0] * (v[1] * v[2] - k.c * v[3]);
    } else {
        F a2 = k.alpha * k.alpha;
        return k.alpha * v[0] * v[1] * (v[2] + k.beta) + v[0] + k.nd * v[3] * (a2 * v[4] * (v[5] + k.beta) - v[6]);
    }
}

template <class F>
F combine(Shape s, std::span<const F> v, const ShapeConsts<F>& k) {
    if (static_cast<int>(v.size()) != shape_factors(s)) throw DimensionMismatch("combine: factor count");
    switch (s) {
        case Shape::ProductOfTwo: return combine_t<Shape::ProductOfTwo>(v.data(), k);
        case Shape::Eq4: return combine_t<Shape::Eq4>(v.data(), k);
        case Shape::Eq7: return combine_t<Shape::Eq7>(v.data(), k);
    }
    return F::zero();
}

template <class F>
struct SumcheckProof {
    std::vector<std::vector<F>> rounds;  // evaluations of g_i at 0..degree
};

template <class F>
struct SumcheckOutput {
    std::vector<F> point;
    std::vector<F> finals;  // factor values at point (prover side)
    F claim;
};

namespace detail {

template <Shape S, class F>
SumcheckProof<F> run_rounds(std::vector<std::vector<F>>& f, const ShapeConsts<F>& k, F claim, Transcript& tr,
                            SumcheckOutput<F>& out) {
    constexpr int nf = S == Shape::ProductOfTwo ? 2 : (S == Shape::Eq4 ? 4 : 7);
    constexpr int d = S == Shape::ProductOfTwo ? 2 : 3;
    SumcheckProof<F> pf;
    std::size_t len = f[0].size();
    while (len > 1) {
        const std::size_t half = len >> 1;
        std::array<F, d + 1> g;
        g.fill(F::zero());
        std::array<F, nf> v, diff;
        for (std::size_t i = 0; i < half; ++i) {
            for (int q = 0; q < nf; ++q) {
                v[q] = f[q][i];
                diff[q] = f[q][i + half] - v[q];
            }
            g[0] += combine_t<S>(v.data(), k);
            for (int t = 1; t <= d; ++t) {
                for (int q = 0; q < nf; ++q) v[q] += diff[q];
                g[t] += combine_t<S>(v.data(), k);
            }
        }
        std::vector<F> gv(g.begin(), g.end());
        tr.append_fields<F>("sc.round", gv);
        F r = tr.challenge<F>("sc.r");
        for (int q = 0; q < nf; ++q) {
            auto& t = f[q];
            for (std::size_t i = 0; i < half; ++i) t[i] += r * (t[i + half] - t[i]);
            t.resize(half);
        }
        pf.rounds.push_back(std::move(gv));
        out.point.push_back(r);
        len = half;
    }
    out.finals.resize(nf);
    for (int q = 0; q < nf; ++q) out.finals[q] = f[q][0];
    out.claim = combine_t<S>(out.finals.data(), k);
    (void)claim;
    return pf;
}

}  // namespace detail

// Proves sum_x rule(factors(x)) = claim. Factor tables are consumed.
template <class F>
SumcheckProof<F> prove_sumcheck(Shape s, std::vector<std::vector<F>> factors, const ShapeConsts<F>& k, const F& claim,
                                Transcript& tr, SumcheckOutput<F>& out, int d_max = 3) {
    if (shape_degree(s) > d_max) throw DegreeOverflow();
    if (static_cast<int>(factors.size()) != shape_factors(s)) throw DimensionMismatch("sumcheck: factor count");
    const std::size_t len = factors[0].size();
    if (!is_pow2(static_cast<std::int64_t>(len))) throw DimensionMismatch("sumcheck: table length");
    for (const auto& t : factors)
        if (t.size() != len) throw DimensionMismatch("sumcheck: factors differ in length");
    tr.append_field("sc.claim", claim);
    tr.append_u64("sc.vars", static_cast<std::uint64_t>(log2_exact(static_cast<std::int64_t>(len))));
    out = SumcheckOutput<F>{};
    switch (s) {
        case Shape::ProductOfTwo: return detail::run_rounds<Shape::ProductOfTwo>(factors, k, claim, tr, out);
        case Shape::Eq4: return detail::run_rounds<Shape::Eq4>(factors, k, claim, tr, out);
        case Shape::Eq7: return detail::run_rounds<Shape::Eq7>(factors, k, claim, tr, out);
    }
    return {};
}

// g(r) from evaluations at 0..d.
template <class F>
F interpolate_at(std::span<const F> evals, const F& r) {
    const int d = static_cast<int>(evals.size()) - 1;
    F acc = F::zero();
    for (int i = 0; i <= d; ++i) {
        F num = F::one();
        std::int64_t den = 1;
        for (int j = 0; j <= d; ++j) {
            if (j == i) continue;
            num *= r - F::from_i64(j);
            den *= i - j;
        }
        acc += evals[i] * num * F::from_i64(den).inverse();
    }
    return acc;
}

// Round checks only. On success point/claim hold the reduced claim rule(factors(point)) = claim.
template <class F>
bool verify_sumcheck_rounds(int n, int degree, F claim, const SumcheckProof<F>& pf, Transcript& tr,
                            std::vector<F>& point, F& final_claim) {
    if (static_cast<int>(pf.rounds.size()) != n) return false;
    tr.append_field("sc.claim", claim);
    tr.append_u64("sc.vars", static_cast<std::uint64_t>(n));
    point.clear();
    for (const auto& g : pf.rounds) {
        if (static_cast<int>(g.size()) != degree + 1) return false;
        if (g[0] + g[1] != claim) return false;
        tr.append_fields<F>("sc.round", g);
        F r = tr.challenge<F>("sc.r");
        claim = interpolate_at<F>(g, r);
        point.push_back(r);
    }
    final_claim = claim;
    return true;
}

// A claim over committed factors, verified with factor openings at the final point.
template <class B>
struct SumcheckClaim {
    using F = typename B::F;
    Shape shape = Shape::ProductOfTwo;
    F sum;
    ShapeConsts<F> consts;
    int num_vars = 0;
    std::vector<Commitment<B>> commitments;
    std::vector<std::vector<F>> tables;  // prover side
    std::vector<std::vector<F>> blinds;  // prover side
};

template <class B>
struct CommittedSumcheckProof {
    SumcheckProof<typename B::F> sc;
    std::vector<OpeningProof<B>> openings;
};

template <class B, class Rng>
CommittedSumcheckProof<B> prove_committed_sumcheck(const CommitmentKey<B>& key, const SumcheckClaim<B>& claim,
                                                   Transcript& tr, Rng& rng) {
    using F = typename B::F;
    for (std::size_t i = 0; i < claim.commitments.size(); ++i) claim.commitments[i].absorb(tr, "sc.factor");
    CommittedSumcheckProof<B> pf;
    SumcheckOutput<F> out;
    pf.sc = prove_sumcheck<F>(claim.shape, claim.tables, claim.consts, claim.sum, tr, out);
    for (std::size_t i = 0; i < claim.tables.size(); ++i)
        pf.openings.push_back(open<B>(key, claim.tables[i], claim.blinds[i], out.point, tr, rng));
    return pf;
}

template <class B>
bool verify_committed_sumcheck(const CommitmentKey<B>& key, const SumcheckClaim<B>& claim,
                               const CommittedSumcheckProof<B>& pf, Transcript& tr, MsmAccumulator<B>& acc) {
    using F = typename B::F;
    const int nf = shape_factors(claim.shape);
    if (static_cast<int>(claim.commitments.size()) != nf || static_cast<int>(pf.openings.size()) != nf) return false;
    for (const auto& c : claim.commitments) {
        if (c.num_vars != claim.num_vars) return false;
        c.absorb(tr, "sc.factor");
    }
    std::vector<F> point;
    F final_claim;
    if (!verify_sumcheck_rounds<F>(claim.num_vars, shape_degree(claim.shape), claim.sum, pf.sc, tr, point, final_claim))
        return false;
    std::vector<F> vals;
    for (int i = 0; i < nf; ++i) {
        if (!verify_opening<B>(key, claim.commitments[i], point, pf.openings[i], tr, acc, "sumcheck factor"))
            return false;
        vals.push_back(pf.openings[i].y);
    }
    return combine<F>(claim.shape, vals, claim.consts) == final_claim;
}

}  // namespace zkl
