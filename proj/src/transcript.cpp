#include "zklora/transcript.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace zkl {

namespace {

struct CtxDeleter {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using Ctx = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

class Hasher {
public:
    explicit Hasher(const EVP_MD* md) : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), md, nullptr) != 1) throw std::runtime_error("EVP init");
    }
    Hasher& put(const void* p, std::size_t n) {
        if (n && EVP_DigestUpdate(ctx_.get(), p, n) != 1) throw std::runtime_error("EVP update");
        return *this;
    }
    Hasher& put_u64(std::uint64_t x) {
        std::uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(x >> (8 * i));
        return put(b, 8);
    }
    Hasher& put_str(std::string_view s) { return put_u64(s.size()).put(s.data(), s.size()); }
    Digest digest() {
        Digest d;
        unsigned len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), d.data(), &len) != 1 || len != 32) throw std::runtime_error("EVP final");
        return d;
    }
    void xof(std::span<std::uint8_t> out) {
        if (EVP_DigestFinalXOF(ctx_.get(), out.data(), out.size()) != 1) throw std::runtime_error("EVP xof");
    }

private:
    Ctx ctx_;
};

}  // namespace

Digest sha3_256(std::span<const std::uint8_t> data) { return Hasher(EVP_sha3_256()).put(data.data(), data.size()).digest(); }

void shake256(std::span<const std::uint8_t> in, std::span<std::uint8_t> out) {
    Hasher(EVP_shake256()).put(in.data(), in.size()).xof(out);
}

Transcript::Transcript(std::string_view domain) {
    state_ = Hasher(EVP_sha3_256()).put_str("zklora/transcript/v1").put_str(domain).digest();
}

void Transcript::append(std::string_view label, std::span<const std::uint8_t> bytes) {
    state_ = Hasher(EVP_sha3_256())
                 .put_str("append")
                 .put(state_.data(), state_.size())
                 .put_str(label)
                 .put_u64(bytes.size())
                 .put(bytes.data(), bytes.size())
                 .digest();
    log_.emplace_back(label, bytes.size());
}

void Transcript::append_u64(std::string_view label, std::uint64_t x) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(x >> (8 * i));
    append(label, b);
}

void Transcript::squeeze(std::string_view label, std::span<std::uint8_t> out) {
    Hasher(EVP_shake256()).put_str("challenge").put(state_.data(), state_.size()).put_str(label).xof(out);
    state_ = Hasher(EVP_sha3_256()).put_str("ratchet").put(state_.data(), state_.size()).put_str(label).digest();
    log_.emplace_back(std::string("challenge:") + std::string(label), out.size());
}

Transcript Transcript::fork(std::string_view label, std::uint64_t index) const {
    Transcript t;
    t.state_ = Hasher(EVP_sha3_256()).put_str("fork").put(state_.data(), state_.size()).put_str(label).put_u64(index).digest();
    return t;
}

void Transcript::merge(std::string_view label, const Transcript& child) { append(label, child.state_); }

Drbg::Drbg(std::span<const std::uint8_t> seed) { key_ = Hasher(EVP_sha3_256()).put_str("drbg").put(seed.data(), seed.size()).digest(); }

Drbg::Drbg(std::string_view label, std::uint64_t seed, std::uint64_t stream) {
    key_ = Hasher(EVP_sha3_256()).put_str("drbg").put_str(label).put_u64(seed).put_u64(stream).digest();
}

void Drbg::refill() {
    Hasher(EVP_shake256()).put(key_.data(), key_.size()).put_u64(counter_++).xof(buf_);
    pos_ = 0;
}

Drbg::result_type Drbg::operator()() {
    if (pos_ + 8 > buf_.size()) refill();
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return x;
}

}  // namespace zkl
