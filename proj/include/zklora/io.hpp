#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "tape.hpp"

namespace zkl {

// Little-endian byte stream writer.
class ByteWriter {
public:
    void u8(std::uint8_t x) { buf_.push_back(x); }
    void u32(std::uint32_t x) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(x >> (8 * i)));
    }
    void u64(std::uint64_t x) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(x >> (8 * i)));
    }
    void i64(std::int64_t x) { u64(static_cast<std::uint64_t>(x)); }
    void f64(double x) {
        std::uint64_t b;
        std::memcpy(&b, &x, 8);
        u64(b);
    }
    void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
    }
    void magic(const char (&m)[5]) { bytes({reinterpret_cast<const std::uint8_t*>(m), 4}); }
    template <class F>
    void field(const F& x) {
        std::array<std::uint8_t, F::kBytes> b;
        x.to_bytes(b.data());
        bytes(b);
    }
    template <class F>
    void fields(const std::vector<F>& xs) {
        u32(static_cast<std::uint32_t>(xs.size()));
        for (const auto& x : xs) field(x);
    }

    const std::vector<std::uint8_t>& data() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

// Reader over a byte span; running past the end is TruncatedFile, malformed content is ParseError.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> b) : b_(b) {}

    std::uint8_t u8() {
        need(1);
        return b_[pos_++];
    }
    std::uint32_t u32() {
        std::uint32_t x = 0;
        for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return x;
    }
    std::uint64_t u64() {
        std::uint64_t x = 0;
        for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return x;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() {
        const std::uint64_t b = u64();
        double x;
        std::memcpy(&x, &b, 8);
        return x;
    }
    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto s = b_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::string str(std::size_t max_len = 1 << 20) {
        const std::uint32_t n = u32();
        if (n > max_len) throw ParseError("string too long");
        auto s = bytes(n);
        return std::string(s.begin(), s.end());
    }
    void magic(const char (&m)[5]) {
        auto s = bytes(4);
        if (std::memcmp(s.data(), m, 4) != 0) throw ParseError(std::string("bad magic, expected ") + m);
    }
    template <class F>
    F field() {
        F x;
        if (!F::from_bytes(bytes(F::kBytes).data(), x)) throw ParseError("non-canonical field element");
        return x;
    }
    template <class F>
    std::vector<F> fields() {
        const std::uint32_t n = count(F::kBytes);
        std::vector<F> v;
        v.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) v.push_back(field<F>());
        return v;
    }
    // Element count, bounded by the bytes left so corrupt counts cannot force huge allocations.
    std::uint32_t count(std::size_t min_elem_bytes) {
        const std::uint32_t n = u32();
        if (static_cast<std::uint64_t>(n) * min_elem_bytes > remaining()) throw TruncatedFile("count exceeds data");
        return n;
    }
    std::size_t remaining() const { return b_.size() - pos_; }
    std::size_t pos() const { return pos_; }
    void expect_end() const {
        if (remaining() != 0) throw ParseError("trailing bytes");
    }

private:
    void need(std::size_t n) const {
        if (n > b_.size() - pos_) throw TruncatedFile("unexpected end of data");
    }
    std::span<const std::uint8_t> b_;
    std::size_t pos_ = 0;
};

inline std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IOFailure("cannot open " + path);
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IOFailure("cannot write " + path);
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!f) throw IOFailure("write failed for " + path);
}

// ---- proof objects ----

template <class B>
void write(ByteWriter& w, const Commitment<B>& c) {
    w.u8(static_cast<std::uint8_t>(c.num_vars));
    w.u32(static_cast<std::uint32_t>(c.rows.size()));
    for (const auto& r : c.rows) w.bytes(r);
}
template <class B>
Commitment<B> read_commitment(ByteReader& r) {
    Commitment<B> c;
    c.num_vars = r.u8();
    if (c.num_vars > 30) throw ParseError("commitment size");
    const std::uint32_t n = r.count(B::Affine::kBytes);
    if (n != (std::size_t{1} << row_vars(c.num_vars))) throw ParseError("commitment row count");
    c.rows.resize(n);
    for (auto& row : c.rows) {
        auto s = r.bytes(row.size());
        std::copy(s.begin(), s.end(), row.begin());
    }
    return c;
}
template <class B>
void write(ByteWriter& w, const std::vector<Commitment<B>>& cs) {
    w.u32(static_cast<std::uint32_t>(cs.size()));
    for (const auto& c : cs) write<B>(w, c);
}
template <class B>
std::vector<Commitment<B>> read_commitments(ByteReader& r) {
    const std::uint32_t n = r.count(5);
    std::vector<Commitment<B>> v;
    v.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) v.push_back(read_commitment<B>(r));
    return v;
}

template <class B>
void write(ByteWriter& w, const OpeningProof<B>& o) {
    w.field(o.y);
    w.bytes(o.delta);
    w.field(o.a);
    w.fields(o.z);
    w.field(o.z_tau);
}
template <class B>
OpeningProof<B> read_opening(ByteReader& r) {
    using F = typename B::F;
    OpeningProof<B> o;
    o.y = r.field<F>();
    auto d = r.bytes(o.delta.size());
    std::copy(d.begin(), d.end(), o.delta.begin());
    o.a = r.field<F>();
    o.z = r.fields<F>();
    o.z_tau = r.field<F>();
    return o;
}

template <class F>
void write(ByteWriter& w, const SumcheckProof<F>& s) {
    w.u32(static_cast<std::uint32_t>(s.rounds.size()));
    for (const auto& g : s.rounds) w.fields(g);
}
template <class F>
SumcheckProof<F> read_sumcheck(ByteReader& r) {
    SumcheckProof<F> s;
    const std::uint32_t n = r.count(4);
    for (std::uint32_t i = 0; i < n; ++i) s.rounds.push_back(r.fields<F>());
    return s;
}

template <class B>
void write(ByteWriter& w, const LookupProof<B>& p) {
    w.u8(p.redraws);
    write<B>(w, p.m);
    write<B>(w, p.A);
    write<B>(w, p.Bv);
    write(w, p.sc);
    write<B>(w, p.open_A);
    write<B>(w, p.open_B);
    write<B>(w, p.open_m);
    w.u32(static_cast<std::uint32_t>(p.open_S.size()));
    for (const auto& o : p.open_S) write<B>(w, o);
    w.u8(p.open_T ? 1 : 0);
    if (p.open_T) write<B>(w, *p.open_T);
}
template <class B>
LookupProof<B> read_lookup(ByteReader& r) {
    LookupProof<B> p;
    p.redraws = r.u8();
    p.m = read_commitment<B>(r);
    p.A = read_commitment<B>(r);
    p.Bv = read_commitment<B>(r);
    p.sc = read_sumcheck<typename B::F>(r);
    p.open_A = read_opening<B>(r);
    p.open_B = read_opening<B>(r);
    p.open_m = read_opening<B>(r);
    const std::uint32_t n = r.count(8);
    for (std::uint32_t i = 0; i < n; ++i) p.open_S.push_back(read_opening<B>(r));
    const std::uint8_t has_t = r.u8();
    if (has_t > 1) throw ParseError("flag");
    if (has_t) p.open_T = read_opening<B>(r);
    return p;
}

template <class B>
void write(ByteWriter& w, const TapeProof<B>& p) {
    w.u32(static_cast<std::uint32_t>(p.steps.size()));
    for (const auto& s : p.steps) {
        write(w, s.sc);
        w.u32(static_cast<std::uint32_t>(s.openings.size()));
        for (const auto& o : s.openings) write<B>(w, o);
    }
    w.u32(static_cast<std::uint32_t>(p.lookups.size()));
    for (const auto& l : p.lookups) write<B>(w, l);
}
template <class B>
TapeProof<B> read_tape_proof(ByteReader& r) {
    TapeProof<B> p;
    const std::uint32_t ns = r.count(8);
    p.steps.resize(ns);
    for (auto& s : p.steps) {
        s.sc = read_sumcheck<typename B::F>(r);
        const std::uint32_t no = r.count(8);
        for (std::uint32_t i = 0; i < no; ++i) s.openings.push_back(read_opening<B>(r));
    }
    const std::uint32_t nl = r.count(8);
    for (std::uint32_t i = 0; i < nl; ++i) p.lookups.push_back(read_lookup<B>(r));
    return p;
}

}  // namespace zkl
