#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "field.hpp"

namespace zkl {

inline bool is_pow2(std::int64_t x) { return x > 0 && (x & (x - 1)) == 0; }
inline int log2_exact(std::int64_t x) {
    if (!is_pow2(x)) throw ShapeMismatch("not a power of two: " + std::to_string(x));
    int k = 0;
    while ((std::int64_t{1} << k) < x) ++k;
    return k;
}
inline std::int64_t next_pow2(std::int64_t x) {
    std::int64_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

// All scales are powers of two and stored as exponents.
struct QuantParams {
    int gamma_bits = 16;        // fixed-point scale of narrow tensors
    int domain_bits = 16;       // B: table domain size and narrow-limb range
    int swiglu_zeta_bits = 4;   // activation input z' = round(z / zeta)
    int rsqrt_zeta_bits = 4;    // rsqrt input v' = round(v / zeta)
    std::vector<int> radix_bits{16, 16, 16, 16, 16};
    int exp_scale_bits = 64;    // fixed-point scale of softmax exponents

    // Small-field configuration: three radices, exponent scale 2^32, fits the 61-bit test prime.
    static QuantParams test_mode() {
        QuantParams q;
        q.radix_bits = {16, 16, 16};
        q.exp_scale_bits = 32;
        return q;
    }

    std::int64_t gamma() const { return std::int64_t{1} << gamma_bits; }
    std::int64_t domain() const { return std::int64_t{1} << domain_bits; }
    int K() const { return static_cast<int>(radix_bits.size()); }
    int xi_bits() const { return exp_scale_bits - gamma_bits; }
    int radix_total_bits() const {
        int s = 0;
        for (int b : radix_bits) s += b;
        return s;
    }
    // Bits of the weight w_k = prod_{j<k} b_j.
    int weight_bits(int k) const {
        int s = 0;
        for (int j = 0; j < k; ++j) s += radix_bits[j];
        return s;
    }
    int act_input_bits() const { return gamma_bits - swiglu_zeta_bits; }
    int rsqrt_input_bits() const { return gamma_bits - rsqrt_zeta_bits; }

    void validate(int field_bits) const {
        auto need = [](bool ok, const char* what) {
            if (!ok) throw ConfigInvalid(what);
        };
        need(gamma_bits >= 4 && gamma_bits <= 24, "gamma_bits out of range");
        need(domain_bits >= 4 && domain_bits <= 20, "domain_bits out of range");
        need(swiglu_zeta_bits >= 1 && swiglu_zeta_bits <= domain_bits, "swiglu zeta out of range");
        need(rsqrt_zeta_bits >= 1 && rsqrt_zeta_bits <= domain_bits, "rsqrt zeta out of range");
        need(!radix_bits.empty(), "softmax needs at least one radix");
        for (int b : radix_bits) need(b >= 1 && b <= 20, "radix bits out of range");
        need(exp_scale_bits >= gamma_bits, "softmax exponent scale below gamma");
        need(exp_scale_bits <= radix_total_bits(), "radices do not cover the exponent scale");
        need(radix_total_bits() + 2 <= field_bits - 1, "softmax exponent range wraps the field");
        need(2 * gamma_bits + 8 <= field_bits - 1, "wide products wrap the field");
    }
};

// round(x * 2^bits), half away from zero; OutOfRange beyond the domain bound.
inline std::int64_t quantize_int(double x, int bits, std::int64_t bound) {
    double s = std::ldexp(x, bits);
    if (!std::isfinite(s) || std::fabs(s) >= static_cast<double>(bound))
        throw OutOfRange("quantize: |x| exceeds the field-safe bound");
    return std::llround(s);
}

template <class F>
F quantize_real(double x, const QuantParams& q) {
    return F::from_i64(quantize_int(x, q.gamma_bits, q.domain() * q.gamma()));
}

template <class F>
double dequantize(const F& f, int bits) {
    return std::ldexp(static_cast<long double>(f.to_i128()), -bits);
}
template <class F>
double dequantize(const F& f, const QuantParams& q) {
    return dequantize(f, q.gamma_bits);
}

template <class F>
struct QuantizedTensor {
    int rows = 0, cols = 0;  // logical shape
    FMat<F> data;            // padded to powers of two, padding is zero
    QuantParams params;

    int padded_rows() const { return static_cast<int>(data.rows()); }
    int padded_cols() const { return static_cast<int>(data.cols()); }

    static QuantizedTensor from_reals(const Eigen::MatrixXd& x, const QuantParams& q) {
        QuantizedTensor t;
        t.rows = static_cast<int>(x.rows());
        t.cols = static_cast<int>(x.cols());
        t.params = q;
        t.data = FMat<F>::Constant(next_pow2(t.rows), next_pow2(t.cols), F::zero());
        for (int i = 0; i < t.rows; ++i)
            for (int j = 0; j < t.cols; ++j) t.data(i, j) = quantize_real<F>(x(i, j), q);
        return t;
    }
    Eigen::MatrixXd to_reals() const {
        Eigen::MatrixXd x(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) x(i, j) = dequantize(data(i, j), params);
        return x;
    }
    bool well_formed() const {
        if (!is_pow2(data.rows()) || !is_pow2(data.cols())) return false;
        if (data.rows() != next_pow2(rows) || data.cols() != next_pow2(cols)) return false;
        const i128 bound = static_cast<i128>(params.domain()) * params.gamma();
        for (int i = 0; i < data.rows(); ++i)
            for (int j = 0; j < data.cols(); ++j) {
                if ((i >= rows || j >= cols) && !data(i, j).is_zero()) return false;
                i128 v = data(i, j).to_i128();
                if (v >= bound || v <= -bound) return false;
            }
        return true;
    }
};

}  // namespace zkl
