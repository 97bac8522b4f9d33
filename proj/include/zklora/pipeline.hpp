#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "dataset.hpp"
#include "io.hpp"
#include "model_tape.hpp"

namespace zkl {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr int kKeyVars = 22;
inline constexpr const char* kKeySeed = "zklora-commitment-key-v1";

template <class F>
double field_log2() {
    if constexpr (std::is_same_v<F, Fr>)
        return 253.5917;  // log2 of the BN254 scalar prime
    else
        return static_cast<double>(F::bits());
}

// ---- artifacts ----

template <class B>
CommitmentKey<B> make_key(int max_vars = kKeyVars) {
    const std::string s = kKeySeed;
    return CommitmentKey<B>::keygen(max_vars, {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

template <class B>
std::vector<std::uint8_t> key_file(int max_vars = kKeyVars) {
    ByteWriter w;
    w.magic("ZKCK");
    w.u32(kFormatVersion);
    w.u8(B::kMode);
    w.u32(static_cast<std::uint32_t>(max_vars));
    w.str(kKeySeed);
    return w.take();
}

template <class B>
CommitmentKey<B> load_key(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.magic("ZKCK");
    if (r.u32() != kFormatVersion) throw VersionMismatch("key file version");
    if (r.u8() != B::kMode) throw ParseError("key file field mode");
    const std::uint32_t vars = r.u32();
    const std::string seed = r.str(1024);
    r.expect_end();
    if (vars > 30) throw ParseError("key size");
    return CommitmentKey<B>::keygen(static_cast<int>(vars), {reinterpret_cast<const std::uint8_t*>(seed.data()), seed.size()});
}

inline std::string table_file_name(std::size_t i, const std::string& name) {
    return "table_" + std::string(i < 10 ? "0" : "") + std::to_string(i) + "_" + name + ".zktb";
}

// Table columns and their zero-blinding commitments.
template <class B>
std::vector<std::uint8_t> table_file(const CommitmentKey<B>& key, const LookupTable<typename B::F>& t) {
    ByteWriter w;
    w.magic("ZKTB");
    w.u32(kFormatVersion);
    w.u8(B::kMode);
    w.str(t.name());
    w.u8(t.paired() ? 1 : 0);
    w.fields(t.x());
    if (t.paired()) w.fields(t.y());
    write<B>(w, commit<B>(key, t.x(), {}));
    if (t.paired()) write<B>(w, commit<B>(key, t.y(), {}));
    return w.take();
}

template <class B>
LookupTable<typename B::F> load_table(std::span<const std::uint8_t> bytes) {
    using F = typename B::F;
    ByteReader r(bytes);
    r.magic("ZKTB");
    if (r.u32() != kFormatVersion) throw VersionMismatch("table file version");
    if (r.u8() != B::kMode) throw ParseError("table file field mode");
    std::string name = r.str(256);
    const std::uint8_t paired = r.u8();
    if (paired > 1) throw ParseError("table flag");
    std::vector<F> x = r.fields<F>(), y;
    if (paired) y = r.fields<F>();
    read_commitment<B>(r);
    if (paired) read_commitment<B>(r);
    r.expect_end();
    return LookupTable<F>(std::move(name), std::move(x), std::move(y));
}

template <class F>
bool same_tables(const TableSet<F>& a, const TableSet<F>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].name() != b[i].name() || a[i].x() != b[i].x() || a[i].y() != b[i].y()) return false;
    return true;
}

struct NamedTensor {
    std::string name;
    int rows = 0, cols = 0;
};

// Weight file: header, then tensors in declaration order as field elements.
template <class B>
std::vector<std::uint8_t> weight_file(const Digest& config_hash, const std::vector<NamedTensor>& specs,
                                      const std::vector<std::vector<typename B::F>>& tensors) {
    ByteWriter w;
    w.magic("ZKWT");
    w.u32(kFormatVersion);
    w.u8(B::kMode);
    w.bytes(config_hash);
    w.u32(static_cast<std::uint32_t>(tensors.size()));
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        w.str(specs[i].name);
        w.u32(static_cast<std::uint32_t>(specs[i].rows));
        w.u32(static_cast<std::uint32_t>(specs[i].cols));
        w.fields(tensors[i]);
    }
    return w.take();
}

template <class B>
std::vector<std::vector<typename B::F>> load_weights(std::span<const std::uint8_t> bytes, const Digest& config_hash,
                                                     const std::vector<NamedTensor>& specs) {
    using F = typename B::F;
    ByteReader r(bytes);
    r.magic("ZKWT");
    if (r.u32() != kFormatVersion) throw VersionMismatch("weight file version");
    if (r.u8() != B::kMode) throw ParseError("weight file field mode");
    auto h = r.bytes(32);
    if (!std::equal(h.begin(), h.end(), config_hash.begin())) throw ConfigInvalid("weight file was made for another config");
    const std::uint32_t n = r.count(12);
    if (n != specs.size()) throw ShapeMismatch("weight file tensor count");
    std::vector<std::vector<F>> out;
    for (const auto& s : specs) {
        if (r.str(256) != s.name) throw ShapeMismatch("weight file tensor order at " + s.name);
        const std::uint32_t rows = r.u32(), cols = r.u32();
        if (static_cast<int>(rows) != s.rows || static_cast<int>(cols) != s.cols) throw ShapeMismatch(s.name);
        auto v = r.fields<F>();
        if (v.size() != static_cast<std::size_t>(rows) * cols) throw ShapeMismatch(s.name);
        out.push_back(std::move(v));
    }
    r.expect_end();
    return out;
}

inline std::vector<NamedTensor> weight_specs(const ModelConfig& cfg) {
    std::vector<NamedTensor> s{{"embed", cfg.v, cfg.d}};
    for (const auto& f : frozen_specs(cfg)) s.push_back({f.name, f.rows, f.cols});
    return s;
}
inline std::vector<NamedTensor> adapter_specs(const ModelConfig& cfg) {
    std::vector<NamedTensor> s;
    for (int l = 0; l < cfg.L; ++l) s.push_back({"l" + std::to_string(l) + ".A", cfg.r, cfg.d});
    for (int l = 0; l < cfg.L; ++l) s.push_back({"l" + std::to_string(l) + ".B", cfg.d, cfg.r});
    return s;
}

// ---- bundle ----

template <class B>
struct EpochSection {
    std::uint32_t index = 0;
    std::vector<Commitment<B>> commitments;  // fresh tensors of the epoch tape, in tensor order
    TapeProof<B> proof;
};

template <class B>
struct ProofBundle {
    Digest config_hash{};
    std::string config_text;
    BudgetCounts claimed;
    std::vector<Commitment<B>> frozen;       // frozen weights in declaration order
    std::vector<Commitment<B>> adapters_in;  // A_0..A_{L-1}, B_0..B_{L-1}
    std::vector<EpochSection<B>> epochs;
    std::vector<Commitment<B>> adapters_out;
};

template <class B>
std::vector<std::uint8_t> serialize(const ProofBundle<B>& b) {
    ByteWriter w;
    w.magic("ZKLB");
    w.u32(kFormatVersion);
    w.u8(B::kMode);
    w.bytes(b.config_hash);
    w.str(b.config_text);
    w.u64(b.claimed.rounds);
    w.u32(static_cast<std::uint32_t>(b.claimed.d_max));
    w.u64(b.claimed.lookup_elements);
    write<B>(w, b.frozen);
    write<B>(w, b.adapters_in);
    w.u32(static_cast<std::uint32_t>(b.epochs.size()));
    for (const auto& e : b.epochs) {
        w.u32(e.index);
        write<B>(w, e.commitments);
        write<B>(w, e.proof);
    }
    write<B>(w, b.adapters_out);
    return w.take();
}

template <class B>
ProofBundle<B> deserialize(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.magic("ZKLB");
    if (const auto v = r.u32(); v != kFormatVersion) throw VersionMismatch("bundle version " + std::to_string(v));
    if (r.u8() != B::kMode) throw ParseError("bundle field mode");
    ProofBundle<B> b;
    auto h = r.bytes(32);
    std::copy(h.begin(), h.end(), b.config_hash.begin());
    b.config_text = r.str(1 << 16);
    b.claimed.rounds = r.u64();
    b.claimed.d_max = static_cast<int>(r.u32());
    b.claimed.lookup_elements = r.u64();
    b.frozen = read_commitments<B>(r);
    b.adapters_in = read_commitments<B>(r);
    const std::uint32_t ne = r.count(12);
    for (std::uint32_t i = 0; i < ne; ++i) {
        EpochSection<B> e;
        e.index = r.u32();
        e.commitments = read_commitments<B>(r);
        e.proof = read_tape_proof<B>(r);
        b.epochs.push_back(std::move(e));
    }
    b.adapters_out = read_commitments<B>(r);
    r.expect_end();
    return b;
}

// ---- soundness accounting ----

struct SoundnessBudget {
    std::uint64_t m = 0;  // sumcheck rounds
    int d_max = 0;
    std::uint64_t C = 0;  // lookup-checked elements, D + N per table batch
    double log2_field = 0;
    // log2 of (m * d_max + C) / |F|. The commitment binding term is kept symbolic, see epsilon_binding.
    double log2_bound() const {
        return std::log2(static_cast<double>(m) * d_max + static_cast<double>(C)) - log2_field;
    }
    static constexpr const char* epsilon_binding = "eps_binding (discrete log in the commitment group, not quantified)";
};

template <class B>
SoundnessBudget make_budget(const BudgetCounts& c) {
    return SoundnessBudget{c.rounds, c.d_max, c.lookup_elements, field_log2<typename B::F>()};
}

// ---- epoch transcript ----

inline Transcript epoch_transcript(const Digest& config_hash, std::uint32_t epoch) {
    Transcript tr("zklora.epoch");
    tr.append("config", config_hash);
    tr.append_u64("epoch", epoch);
    return tr;
}

template <class B>
std::vector<Committed<B>> handles(const std::vector<Commitment<B>>& cs) {
    std::vector<Committed<B>> out;
    for (const auto& c : cs) out.push_back(Committed<B>::from_commitment(c));
    return out;
}

// ---- prover ----

// Prover inputs in fixed point. embed rows give X_0, frozen and adapters follow frozen_specs and adapter_specs order.
template <class F>
struct ProverInputs {
    std::vector<F> embed;
    std::vector<std::vector<F>> frozen;
    std::vector<std::vector<F>> adapters;  // A_0..A_{L-1}, B_0..B_{L-1}
    std::vector<DatasetBatch> batches;
};

struct EpochTiming {
    double witness = 0, commit = 0, prove_fwd = 0, prove_bwd = 0, prove_upd = 0, prove_lookup = 0, verify = 0;
    double prove_total() const { return witness + commit + prove_fwd + prove_bwd + prove_upd + prove_lookup; }
};

template <class F>
Sample<F> make_sample(const ModelConfig& cfg, const std::vector<F>& embed, const DatasetBatch& b) {
    if (b.x.size() != static_cast<std::size_t>(cfg.n) || b.labels.size() != b.x.size())
        throw ShapeMismatch("batch length must equal n");
    Sample<F> s;
    const F g = F::from_i64(cfg.quant.gamma());
    s.y.assign(static_cast<std::size_t>(cfg.n) * cfg.v, F::zero());
    for (int i = 0; i < cfg.n; ++i) {
        const int t = b.x[i], y = b.labels[i];
        if (t < 0 || t >= cfg.v || y < 0 || y >= cfg.v) throw TokenOutOfVocab("token outside the vocabulary");
        s.x0.insert(s.x0.end(), embed.begin() + static_cast<std::ptrdiff_t>(t) * cfg.d,
                    embed.begin() + static_cast<std::ptrdiff_t>(t + 1) * cfg.d);
        s.y[static_cast<std::size_t>(i) * cfg.v + y] = g;
    }
    return s;
}

template <class B>
class Prover {
public:
    using F = typename B::F;

    Prover(const RunConfig& rc, const CommitmentKey<B>& key, const TableSet<F>& tables, ProverInputs<F> in)
        : rc_(rc), key_(key), tables_(tables), in_(std::move(in)) {
        const auto& cfg = rc_.model;
        if (in_.frozen.size() != frozen_specs(cfg).size() || in_.adapters.size() != 2u * cfg.L)
            throw ShapeMismatch("prover inputs");
        if (in_.batches.empty()) throw EmptyDataset("no batches");
        Drbg fr("zkl.blinds.frozen", rc_.seed);
        for (const auto& t : in_.frozen) frozen_.push_back(Committed<B>::make(key_, t, fr));
        Drbg ar("zkl.blinds.adapters", rc_.seed);
        for (const auto& t : in_.adapters) adapters_.push_back(Committed<B>::make(key_, t, ar));
    }

    ProofBundle<B> run(std::vector<EpochTiming>* timing = nullptr) {
        ProofBundle<B> b;
        b.config_hash = rc_.hash();
        b.config_text = rc_.public_text();
        for (const auto& c : frozen_) b.frozen.push_back(c.com);
        for (const auto& c : adapters_) b.adapters_in.push_back(c.com);
        for (int e = 0; e < rc_.epochs; ++e) {
            EpochTiming tm;
            b.epochs.push_back(epoch(static_cast<std::uint32_t>(e), b.config_hash, b.claimed, tm));
            if (timing) timing->push_back(tm);
        }
        for (const auto& c : adapters_) b.adapters_out.push_back(c.com);
        return b;
    }

    // Current adapters in fixed point, A_0..A_{L-1}, B_0..B_{L-1}.
    std::vector<std::vector<F>> adapters() const {
        std::vector<std::vector<F>> out;
        for (const auto& c : adapters_) out.push_back(c.table);
        return out;
    }
    // Unproven cross-entropy of each epoch's forward pass, for reporting.
    const std::vector<double>& losses() const { return losses_; }

private:
    EpochSection<B> epoch(std::uint32_t e, const Digest& hash, BudgetCounts& budget, EpochTiming& tm) {
        using clock = std::chrono::steady_clock;
        auto secs = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };
        const auto& cfg = rc_.model;
        std::vector<Sample<F>> samples;
        for (int s = 0; s < cfg.batch; ++s) {
            const auto& bt = in_.batches[(static_cast<std::size_t>(e) * cfg.batch + s) % in_.batches.size()];
            samples.push_back(make_sample(cfg, in_.embed, bt));
        }
        auto t0 = clock::now();
        Tape<B> t(tables_, true);
        ModelBuilder<B> mb(t, cfg);
        const std::vector<Committed<B>> A(adapters_.begin(), adapters_.begin() + cfg.L),
            Bm(adapters_.begin() + cfg.L, adapters_.end());
        EpochIds ids;
        try {
            ids = mb.build(frozen_, A, Bm, samples);
        } catch (const Error& err) {
            throw PrecondViolation("epoch " + std::to_string(e) + ": " + err.what());
        }
        double loss = 0;
        for (std::size_t s = 0; s < samples.size(); ++s)
            loss += cross_entropy(dequantize_mat(t.val(ids.yhat[s]), cfg.n, cfg.v, cfg.quant),
                                   dequantize_mat(samples[s].y, cfg.n, cfg.v, cfg.quant));
        losses_.push_back(loss);
        tm.witness = secs(t0);

        t0 = clock::now();
        Drbg rng("zkl.prove", rc_.seed, e);
        t.commit_all(key_, rng);
        tm.commit = secs(t0);

        Transcript tr = epoch_transcript(hash, e);
        t.absorb(tr);
        ProveProfile prof;
        EpochSection<B> sec;
        sec.index = e;
        sec.proof = t.prove(key_, tr, rng, false, &prof);
        sec.commitments = t.fresh_commitments();
        for (std::size_t i = 0; i < prof.step_seconds.size(); ++i) {
            const auto& w = t.steps()[i].where;
            (w.rfind("fwd.", 0) == 0 ? tm.prove_fwd : w.rfind("bwd.", 0) == 0 ? tm.prove_bwd : tm.prove_upd) +=
                prof.step_seconds[i];
        }
        tm.prove_lookup = prof.lookup_seconds;
        budget += t.budget();

        std::vector<Committed<B>> next;
        for (int id : ids.A_out) next.push_back(t.committed(id));
        for (int id : ids.B_out) next.push_back(t.committed(id));
        adapters_ = std::move(next);
        return sec;
    }

    const RunConfig& rc_;
    const CommitmentKey<B>& key_;
    const TableSet<F>& tables_;
    ProverInputs<F> in_;
    std::vector<Committed<B>> frozen_, adapters_;
    std::vector<double> losses_;
};

// ---- verifier ----

struct VerifyReport {
    bool accept = false;
    std::string reason;  // first failing coordinate on reject
    SoundnessBudget budget;
    bool budget_matches = false;
    std::vector<double> epoch_seconds;
};

// Inputs are exactly the bundle, the public tables, the commitment key, the expected config hash and the vocab
// size; the model shape comes from the config text bound in the bundle.
template <class B>
VerifyReport verify_bundle(std::span<const std::uint8_t> bytes, const CommitmentKey<B>& key,
                           const TableSet<typename B::F>& tables, const Digest& expected_hash, int vocab_size,
                           std::uint64_t acc_seed = std::random_device{}()) {
    using clock = std::chrono::steady_clock;
    VerifyReport rep;
    auto reject = [&](std::string why) {
        rep.accept = false;
        rep.reason = std::move(why);
        return rep;
    };
    ProofBundle<B> b;
    RunConfig rc;
    try {
        b = deserialize<B>(bytes);
        rc = RunConfig::from_public_text(b.config_text);
    } catch (const Error& e) {
        return reject(std::string("parse: ") + e.what());
    }
    if (b.config_hash != expected_hash || rc.hash() != expected_hash) return reject("config hash mismatch");
    const auto& cfg = rc.model;
    if (cfg.v != vocab_size) return reject("vocab size mismatch");
    if ((rc.field == FieldMode::Big) != std::is_same_v<typename B::F, Fr>) return reject("field mode mismatch");
    const auto& q = tables.params();
    if (q.gamma_bits != cfg.quant.gamma_bits || q.domain_bits != cfg.quant.domain_bits ||
        q.radix_bits != cfg.quant.radix_bits || q.exp_scale_bits != cfg.quant.exp_scale_bits ||
        q.swiglu_zeta_bits != cfg.quant.swiglu_zeta_bits || q.rsqrt_zeta_bits != cfg.quant.rsqrt_zeta_bits ||
        tables.ln_eps() != cfg.ln_eps)
        return reject("tables do not match the config");
    if (b.epochs.size() != static_cast<std::size_t>(rc.epochs)) return reject("epoch count");
    if (b.frozen.size() != frozen_specs(cfg).size()) return reject("frozen commitment count");
    if (b.adapters_in.size() != 2u * cfg.L || b.adapters_out.size() != 2u * cfg.L)
        return reject("adapter commitment count");

    BudgetCounts counted;
    std::vector<Commitment<B>> adapters = b.adapters_in;
    for (std::uint32_t e = 0; e < b.epochs.size(); ++e) {
        const auto t0 = clock::now();
        const auto& sec = b.epochs[e];
        const std::string at = "epoch " + std::to_string(e) + ": ";
        if (sec.index != e) return reject(at + "epoch index");
        Tape<B> t(tables, false);
        ModelBuilder<B> mb(t, cfg);
        const auto fr = handles<B>(b.frozen);
        const auto ad = handles<B>(adapters);
        EpochIds ids;
        try {
            ids = mb.build(fr, {ad.begin(), ad.begin() + cfg.L}, {ad.begin() + cfg.L, ad.end()}, {});
        } catch (const Error& err) {
            return reject(at + "commitment shapes: " + err.what());
        }
        if (!t.set_fresh_commitments(sec.commitments)) return reject(at + "tensor commitments");
        Transcript tr = epoch_transcript(b.config_hash, e);
        MsmAccumulator<B> acc(key, acc_seed + e);
        std::string where;
        try {
            t.absorb(tr);
            if (!t.verify(key, sec.proof, tr, acc, &where)) return reject(at + where);
            if (!acc.finalize(&where)) return reject(at + "opening " + where);
        } catch (const Error& err) {
            return reject(at + err.what());
        }
        counted += t.budget();
        adapters.clear();
        for (int id : ids.A_out) adapters.push_back(t.committed(id).com);
        for (int id : ids.B_out) adapters.push_back(t.committed(id).com);
        rep.epoch_seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    }
    if (adapters != b.adapters_out) return reject("final adapter commitments do not chain");
    rep.budget = make_budget<B>(counted);
    rep.budget_matches = counted == b.claimed;
    if (!rep.budget_matches) return reject("claimed soundness budget differs from the recomputed one");
    rep.accept = true;
    return rep;
}

}  // namespace zkl
