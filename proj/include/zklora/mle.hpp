#pragma once

#include <span>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "quant.hpp"

namespace zkl {

// eq(r, b) for every boolean b, index bit order with r[0] as the most significant bit.
template <class F>
std::vector<F> eq_table(std::span<const F> r) {
    std::vector<F> t(std::size_t{1} << r.size());
    t[0] = F::one();
    std::size_t len = 1;
    for (std::size_t k = r.size(); k-- > 0;) {
        // prepend variable r[k] as the new most significant bit
        const F& x = r[k];
        for (std::size_t i = 0; i < len; ++i) {
            t[len + i] = t[i] * x;
            t[i] -= t[len + i];
        }
        len <<= 1;
    }
    return t;
}

template <class F>
F eq_eval(std::span<const F> a, std::span<const F> b) {
    if (a.size() != b.size()) throw DimensionMismatch("eq_eval");
    F acc = F::one();
    for (std::size_t i = 0; i < a.size(); ++i) {
        F ab = a[i] * b[i];
        acc *= ab + ab - a[i] - b[i] + F::one();
    }
    return acc;
}

// Evaluation of the MLE of table (length 2^x.size()) by successive folding.
template <class F>
F mle_eval(std::span<const F> table, std::span<const F> x) {
    if (table.size() != (std::size_t{1} << x.size())) throw DimensionMismatch("mle_eval");
    if (x.empty()) return table[0];
    std::size_t half = table.size() >> 1;
    std::vector<F> buf(half);
    for (std::size_t i = 0; i < half; ++i) buf[i] = table[i] + x[0] * (table[i + half] - table[i]);
    for (std::size_t k = 1; k < x.size(); ++k) {
        half >>= 1;
        for (std::size_t i = 0; i < half; ++i) buf[i] += x[k] * (buf[i + half] - buf[i]);
    }
    return buf[0];
}

template <class F>
class DenseMultilinear {
public:
    DenseMultilinear() : table_(1, F::zero()) {}
    explicit DenseMultilinear(std::vector<F> table) : table_(std::move(table)) {
        if (!is_pow2(static_cast<std::int64_t>(table_.size())))
            throw DimensionMismatch("table length is not a power of two");
        n_ = log2_exact(static_cast<std::int64_t>(table_.size()));
    }
    static DenseMultilinear from_matrix(const FMat<F>& m) {
        return DenseMultilinear(std::vector<F>(m.data(), m.data() + m.size()));
    }
    static DenseMultilinear from_tensor(const QuantizedTensor<F>& t) { return from_matrix(t.data); }

    int num_vars() const { return n_; }
    const std::vector<F>& table() const { return table_; }
    const F& operator[](std::size_t i) const { return table_[i]; }

    F evaluate(std::span<const F> x) const {
        if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("evaluate: point length");
        return mle_eval<F>(table_, x);
    }
    DenseMultilinear fold(const F& r) const {
        if (n_ == 0) throw FoldOnConstant();
        std::size_t half = table_.size() >> 1;
        std::vector<F> out(half);
        for (std::size_t i = 0; i < half; ++i) out[i] = table_[i] + r * (table_[i + half] - table_[i]);
        return DenseMultilinear(std::move(out));
    }

private:
    std::vector<F> table_;
    int n_ = 0;
};

}  // namespace zkl
