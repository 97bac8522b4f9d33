#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lookup.hpp"
#include "quant.hpp"

namespace zkl {

inline double silu(double t) { return t / (1.0 + std::exp(-t)); }
inline double silu_prime(double t) {
    double s = 1.0 / (1.0 + std::exp(-t));
    return s * (1.0 + t * (1.0 - s));
}

enum class TableId : int { Quant = 0, Residue = 1, Silu = 2, SiluPrime = 3, Rsqrt = 4, Exp0 = 5 };

// Every gadget table, generated deterministically from the quantization parameters.
template <class F>
class TableSet {
public:
    TableSet() = default;
    TableSet(const QuantParams& q, double ln_eps) : q_(q), eps_(ln_eps) {
        const std::int64_t B = q.domain(), half = B / 2;
        const std::size_t N = static_cast<std::size_t>(B);
        tables_.push_back(LookupTable<F>::range("quant", -half, N));
        tables_.push_back(LookupTable<F>::range("residue", -half, N));
        const int ab = q.act_input_bits();
        const double g = static_cast<double>(q.gamma());
        tables_.push_back(LookupTable<F>::function("silu", -half, N, [&](std::int64_t x) {
            return static_cast<std::int64_t>(std::llround(g * silu(std::ldexp(static_cast<double>(x), -ab))));
        }));
        tables_.push_back(LookupTable<F>::function("silu_prime", -half, N, [&](std::int64_t x) {
            return static_cast<std::int64_t>(std::llround(g * silu_prime(std::ldexp(static_cast<double>(x), -ab))));
        }));
        const int rb = q.rsqrt_input_bits();
        tables_.push_back(LookupTable<F>::function("rsqrt", 0, N, [&](std::int64_t x) {
            return static_cast<std::int64_t>(
                std::llround(g / std::sqrt(std::ldexp(static_cast<double>(x), -rb) + ln_eps)));
        }));
        for (int k = 0; k < q.K(); ++k) {
            const int shift = q.weight_bits(k) - q.exp_scale_bits;
            tables_.push_back(LookupTable<F>::function(
                "exp" + std::to_string(k), 0, std::size_t{1} << q.radix_bits[k], [&](std::int64_t x) {
                    long double e = std::exp(-std::ldexp(static_cast<long double>(x), shift));
                    return static_cast<std::int64_t>(std::floor(static_cast<long double>(g) * e));
                }));
        }
    }

    // Tables read back from files; the caller checks them against a generated set.
    TableSet(const QuantParams& q, double ln_eps, std::vector<LookupTable<F>> tables)
        : q_(q), eps_(ln_eps), tables_(std::move(tables)) {
        if (tables_.size() != static_cast<std::size_t>(TableId::Exp0) + q.K()) throw ShapeMismatch("table count");
    }
    static std::size_t count(const QuantParams& q) { return static_cast<std::size_t>(TableId::Exp0) + q.K(); }

    const QuantParams& params() const { return q_; }
    double ln_eps() const { return eps_; }
    std::size_t size() const { return tables_.size(); }
    const LookupTable<F>& operator[](std::size_t i) const { return tables_[i]; }
    const LookupTable<F>& get(TableId id) const { return tables_[static_cast<std::size_t>(id)]; }
    const LookupTable<F>& exp(int k) const { return tables_[static_cast<std::size_t>(TableId::Exp0) + k]; }
    static std::size_t exp_index(int k) { return static_cast<std::size_t>(TableId::Exp0) + k; }

    // Host-side table function values for prover witness generation.
    std::int64_t apply(TableId id, std::int64_t x) const {
        const auto& t = get(id);
        std::int64_t lo = id == TableId::Rsqrt ? 0 : -q_.domain() / 2;
        std::int64_t idx = x - lo;
        if (idx < 0 || idx >= static_cast<std::int64_t>(t.size())) throw RangeViolation(t.name() + ": input outside the table domain");
        return t.y()[static_cast<std::size_t>(idx)].to_i64();
    }
    std::int64_t apply_exp(int k, std::int64_t digit) const {
        const auto& t = exp(k);
        if (digit < 0 || digit >= static_cast<std::int64_t>(t.size())) throw DigitOutOfRange("softmax digit outside radix");
        return t.y()[static_cast<std::size_t>(digit)].to_i64();
    }

private:
    QuantParams q_;
    double eps_ = 1e-5;
    std::vector<LookupTable<F>> tables_;
};

}  // namespace zkl
