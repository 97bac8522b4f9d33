#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace zkl {

using Digest = std::array<std::uint8_t, 32>;

Digest sha3_256(std::span<const std::uint8_t> data);
void shake256(std::span<const std::uint8_t> in, std::span<std::uint8_t> out);

// Fiat-Shamir transcript over SHA3-256 (absorb) and SHAKE256 (squeeze).
class Transcript {
public:
    explicit Transcript(std::string_view domain);

    void append(std::string_view label, std::span<const std::uint8_t> bytes);
    void append_u64(std::string_view label, std::uint64_t x);
    template <class F>
    void append_field(std::string_view label, const F& x) {
        std::array<std::uint8_t, F::kBytes> b;
        x.to_bytes(b.data());
        append(label, b);
    }
    template <class F>
    void append_fields(std::string_view label, std::span<const F> xs) {
        std::vector<std::uint8_t> b(xs.size() * F::kBytes);
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i].to_bytes(b.data() + i * F::kBytes);
        append(label, b);
    }

    // 64 squeezed bytes reduced into the field.
    template <class F>
    F challenge(std::string_view label) {
        std::array<std::uint8_t, 64> out;
        squeeze(label, out);
        return F::from_wide(out.data());
    }
    template <class F>
    std::vector<F> challenges(std::string_view label, std::size_t n) {
        std::vector<F> v;
        v.reserve(n);
        for (std::size_t i = 0; i < n; ++i) v.push_back(challenge<F>(label));
        return v;
    }

    // Independent branch keyed by (state, label, index); merge absorbs the branch digest.
    Transcript fork(std::string_view label, std::uint64_t index) const;
    void merge(std::string_view label, const Transcript& child);

    const Digest& state() const { return state_; }
    const std::vector<std::pair<std::string, std::size_t>>& log() const { return log_; }

private:
    Transcript() = default;
    void squeeze(std::string_view label, std::span<std::uint8_t> out);
    Digest state_{};
    std::vector<std::pair<std::string, std::size_t>> log_;
};

// Deterministic byte stream from a seed (SHAKE256 in counter mode); a UniformRandomBitGenerator.
class Drbg {
public:
    using result_type = std::uint64_t;
    explicit Drbg(std::span<const std::uint8_t> seed);
    Drbg(std::string_view label, std::uint64_t seed, std::uint64_t stream = 0);
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()();

private:
    void refill();
    Digest key_{};
    std::uint64_t counter_ = 0;
    std::array<std::uint8_t, 128> buf_{};
    std::size_t pos_ = 128;
};

}  // namespace zkl
