#include "zklora/commands.hpp"

#include <sys/resource.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace zkl {

namespace fs = std::filesystem;

namespace {

std::string path_in(const RunConfig& rc, const std::string& name) { return (fs::path(rc.out) / name).string(); }

std::vector<DatasetBatch> load_batches(const RunConfig& rc) {
    const auto& cfg = rc.model;
    if (!rc.dataset.empty()) {
        if (rc.vocab.empty()) throw ConfigInvalid("dataset needs a vocab file");
        return ingest_dataset(rc.dataset, rc.vocab, cfg.n, cfg.v);
    }
    // no dataset configured: a seeded token stream, four windows long
    Drbg rng("zkl.dataset", rc.seed);
    std::vector<int> tok(static_cast<std::size_t>(cfg.n) * 4 + 1);
    for (auto& t : tok) t = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.v));
    return make_batches(tok, cfg.n);
}

template <class B>
struct Setup {
    using F = typename B::F;
    std::vector<std::vector<F>> weights, adapters;  // weight_specs and adapter_specs orders
};

template <class B>
Setup<B> fresh_setup(const RunConfig& rc) {
    using F = typename B::F;
    const auto& cfg = rc.model;
    Setup<B> s;
    RealWeights w = synthetic_weights(cfg, rc.seed);
    s.weights.push_back(quantize_mat<F>(w.embed, cfg.quant));
    for (const auto& m : frozen_tensors(w)) s.weights.push_back(quantize_mat<F>(m, cfg.quant));
    RealAdapters a = init_adapters(cfg, rc.seed);
    for (const auto& m : a.A) s.adapters.push_back(quantize_mat<F>(m, cfg.quant));
    for (const auto& m : a.B) s.adapters.push_back(quantize_mat<F>(m, cfg.quant));
    return s;
}

template <class B>
ProverInputs<typename B::F> prover_inputs(const RunConfig& rc, Setup<B> s, std::vector<DatasetBatch> batches) {
    ProverInputs<typename B::F> in;
    in.embed = std::move(s.weights[0]);
    in.frozen.assign(std::make_move_iterator(s.weights.begin() + 1), std::make_move_iterator(s.weights.end()));
    in.adapters = std::move(s.adapters);
    in.batches = std::move(batches);
    return in;
}

template <class B>
std::vector<std::string> setup_impl(const RunConfig& rc) {
    using F = typename B::F;
    fs::create_directories(rc.out);
    std::vector<std::string> files;
    auto put = [&](const std::string& name, const std::vector<std::uint8_t>& bytes) {
        write_file(path_in(rc, name), bytes);
        files.push_back(name);
    };
    const auto key = make_key<B>();
    put("key.zkck", key_file<B>());
    TableSet<F> tables(rc.model.quant, rc.model.ln_eps);
    for (std::size_t i = 0; i < tables.size(); ++i) put(table_file_name(i, tables[i].name()), table_file<B>(key, tables[i]));
    const Digest h = rc.hash();
    Setup<B> s;
    if (rc.weights.empty()) {
        s = fresh_setup<B>(rc);
    } else {
        s.weights = load_weights<B>(read_file(rc.weights), h, weight_specs(rc.model));
        s.adapters = fresh_setup<B>(rc).adapters;
    }
    put("weights.zkwt", weight_file<B>(h, weight_specs(rc.model), s.weights));
    put("adapters.zkwt", weight_file<B>(h, adapter_specs(rc.model), s.adapters));
    return files;
}

template <class B>
std::size_t commitment_bytes(const ProofBundle<B>& b) {
    auto one = [](const Commitment<B>& c) { return 5 + c.rows.size() * B::Affine::kBytes; };
    std::size_t n = 0;
    for (const auto* v : {&b.frozen, &b.adapters_in, &b.adapters_out})
        for (const auto& c : *v) n += one(c);
    for (const auto& e : b.epochs)
        for (const auto& c : e.commitments) n += one(c);
    return n;
}

template <class B>
ProveResult prove_impl(const RunConfig& rc) {
    using F = typename B::F;
    const Digest h = rc.hash();
    Setup<B> s;
    s.weights = load_weights<B>(read_file(rc.weights.empty() ? path_in(rc, "weights.zkwt") : rc.weights), h,
                                weight_specs(rc.model));
    s.adapters = load_weights<B>(read_file(path_in(rc, "adapters.zkwt")), h, adapter_specs(rc.model));
    const auto key = load_key<B>(read_file(path_in(rc, "key.zkck")));
    TableSet<F> tables(rc.model.quant, rc.model.ln_eps);
    Prover<B> p(rc, key, tables, prover_inputs<B>(rc, std::move(s), load_batches(rc)));
    ProveResult res;
    const auto bundle = p.run(&res.timing);
    res.losses = p.losses();
    const auto bytes = serialize(bundle);
    res.bundle_path = path_in(rc, "bundle.zklb");
    res.bundle_bytes = bytes.size();
    write_file(res.bundle_path, bytes);
    write_file(path_in(rc, "adapters_final.zkwt"), weight_file<B>(h, adapter_specs(rc.model), p.adapters()));
    return res;
}

template <class B>
TableSet<typename B::F> load_tables(const RunConfig& rc) {
    using F = typename B::F;
    TableSet<F> expect(rc.model.quant, rc.model.ln_eps);
    std::vector<LookupTable<F>> loaded;
    for (std::size_t i = 0; i < expect.size(); ++i)
        loaded.push_back(load_table<B>(read_file(path_in(rc, table_file_name(i, expect[i].name())))));
    TableSet<F> t(rc.model.quant, rc.model.ln_eps, std::move(loaded));
    if (!same_tables(t, expect)) throw ConfigInvalid("table files do not match the config");
    return t;
}

template <class B>
VerifyReport verify_impl(const RunConfig& rc, const std::string& bundle_path) {
    const auto key = load_key<B>(read_file(path_in(rc, "key.zkck")));
    const auto tables = load_tables<B>(rc);
    return verify_bundle<B>(read_file(bundle_path), key, tables, rc.hash(), rc.model.v);
}

double peak_mb() {
    rusage u{};
    getrusage(RUSAGE_SELF, &u);
    return static_cast<double>(u.ru_maxrss) / 1024.0;
}

template <class B>
BenchRow bench_one(const RunConfig& base, int n) {
    using F = typename B::F;
    using clock = std::chrono::steady_clock;
    RunConfig rc = base;
    rc.model.n = n;
    rc.epochs = 1;
    rc.dataset.clear();
    rc.validate();
    const auto key = make_key<B>();
    TableSet<F> tables(rc.model.quant, rc.model.ln_eps);
    Prover<B> p(rc, key, tables, prover_inputs<B>(rc, fresh_setup<B>(rc), load_batches(rc)));
    std::vector<EpochTiming> tm;
    const auto bundle = p.run(&tm);
    const auto bytes = serialize(bundle);
    const auto t0 = clock::now();
    const auto rep = verify_bundle<B>(bytes, key, tables, rc.hash(), rc.model.v);
    BenchRow r;
    r.n = n;
    r.verify = std::chrono::duration<double>(clock::now() - t0).count();
    r.prove = tm[0].prove_total();
    r.commit = tm[0].commit;
    r.prove_fwd = tm[0].prove_fwd;
    r.prove_bwd = tm[0].prove_bwd;
    r.prove_upd = tm[0].prove_upd;
    r.prove_lookup = tm[0].prove_lookup;
    r.bundle_bytes = bytes.size();
    r.commitment_bytes = commitment_bytes(bundle);
    r.peak_mb = peak_mb();
    r.accepted = rep.accept;
    return r;
}

template <class B>
std::vector<BenchRow> bench_impl(const RunConfig& rc, std::ostream& os) {
    std::vector<BenchRow> rows;
    for (int n : rc.bench_ns) rows.push_back(bench_one<B>(rc, n));
    nlohmann::json js = nlohmann::json::array();
    for (const auto& r : rows) {
        const std::string p = "n" + std::to_string(r.n) + ".";
        os << p << "prove_time=" << r.prove << " s\n"
           << p << "prove_forward=" << r.prove_fwd << " s\n"
           << p << "prove_backward=" << r.prove_bwd << " s\n"
           << p << "prove_update=" << r.prove_upd << " s\n"
           << p << "prove_lookup=" << r.prove_lookup << " s\n"
           << p << "verify_time=" << r.verify << " s\n"
           << p << "commit_time=" << r.commit << " s\n"
           << p << "commitment_size=" << static_cast<double>(r.commitment_bytes) / 1e6 << " MB\n"
           << p << "bundle_size=" << static_cast<double>(r.bundle_bytes) / 1e6 << " MB\n"
           << p << "peak_memory=" << r.peak_mb << " MB\n"
           << p << "accepted=" << (r.accepted ? 1 : 0) << " bool\n";
        js.push_back({{"n", r.n},
                      {"prove_time_s", r.prove},
                      {"prove_forward_s", r.prove_fwd},
                      {"prove_backward_s", r.prove_bwd},
                      {"prove_update_s", r.prove_upd},
                      {"prove_lookup_s", r.prove_lookup},
                      {"verify_time_s", r.verify},
                      {"commit_time_s", r.commit},
                      {"commitment_size_mb", static_cast<double>(r.commitment_bytes) / 1e6},
                      {"bundle_size_mb", static_cast<double>(r.bundle_bytes) / 1e6},
                      {"peak_memory_mb", r.peak_mb},
                      {"accepted", r.accepted}});
    }
    os << "\n"
       << std::left << std::setw(22) << "config" << std::right << std::setw(12) << "prove (s)" << std::setw(12)
       << "verify (s)" << std::setw(12) << "commit (s)" << std::setw(16) << "commit size MB" << std::setw(14)
       << "bundle MB" << std::setw(14) << "peak mem MB" << "\n";
    for (const auto& r : rows) {
        std::ostringstream name;
        name << "L" << rc.model.L << " n" << r.n << " d" << rc.model.d << " h" << rc.model.h;
        os << std::left << std::setw(22) << name.str() << std::right << std::fixed << std::setprecision(3)
           << std::setw(12) << r.prove << std::setw(12) << r.verify << std::setw(12) << r.commit << std::setw(16)
           << static_cast<double>(r.commitment_bytes) / 1e6 << std::setw(14) << static_cast<double>(r.bundle_bytes) / 1e6
           << std::setw(14) << r.peak_mb << "\n";
        os.unsetf(std::ios::fixed);
    }
    fs::create_directories(rc.out);
    std::ofstream(path_in(rc, "bench.json")) << js.dump(2) << "\n";
    return rows;
}

}  // namespace

std::vector<std::string> setup_file_names(const RunConfig& rc) {
    std::vector<std::string> f{"key.zkck"};
    const auto q = rc.model.quant;
    const char* names[] = {"quant", "residue", "silu", "silu_prime", "rsqrt"};
    std::size_t i = 0;
    for (const char* n : names) f.push_back(table_file_name(i++, n));
    for (int k = 0; k < q.K(); ++k) f.push_back(table_file_name(i++, "exp" + std::to_string(k)));
    f.push_back("weights.zkwt");
    f.push_back("adapters.zkwt");
    return f;
}

std::vector<std::string> cmd_setup(const RunConfig& rc) {
    rc.validate();
    return rc.field == FieldMode::Big ? setup_impl<Bn254>(rc) : setup_impl<Toy61>(rc);
}

ProveResult cmd_prove(const RunConfig& rc) {
    rc.validate();
    return rc.field == FieldMode::Big ? prove_impl<Bn254>(rc) : prove_impl<Toy61>(rc);
}

VerifyReport cmd_verify(const RunConfig& rc, const std::string& bundle_path) {
    return rc.field == FieldMode::Big ? verify_impl<Bn254>(rc, bundle_path) : verify_impl<Toy61>(rc, bundle_path);
}

void print_report(std::ostream& os, const VerifyReport& r, bool big_field) {
    os << (r.accept ? "ACCEPT" : "REJECT");
    if (!r.accept) os << ": " << r.reason;
    os << "\n";
    if (!r.accept) return;
    os << "soundness.m=" << r.budget.m << " rounds\n"
       << "soundness.d_max=" << r.budget.d_max << " degree\n"
       << "soundness.C=" << r.budget.C << " elements\n"
       << "soundness.log2_bound=" << r.budget.log2_bound() << " log2\n"
       << "soundness.budget_matches_claim=" << (r.budget_matches ? 1 : 0) << " bool\n"
       << "soundness.binding_term=" << SoundnessBudget::epsilon_binding << "\n";
    if (big_field) os << "soundness.below_2^-200=" << (r.budget.log2_bound() < -200 ? 1 : 0) << " bool\n";
    for (std::size_t e = 0; e < r.epoch_seconds.size(); ++e)
        os << "verify.epoch" << e << "=" << r.epoch_seconds[e] << " s\n";
}

std::vector<BenchRow> cmd_bench(const RunConfig& rc, std::ostream& os) {
    rc.validate();
    return rc.field == FieldMode::Big ? bench_impl<Bn254>(rc, os) : bench_impl<Toy61>(rc, os);
}

}  // namespace zkl
