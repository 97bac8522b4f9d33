#include "zklora/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace zkl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T to_num(const std::string& key, const std::string& v) {
    T x{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigInvalid("bad value for " + key + ": " + v);
    return x;
}

double to_real(const std::string& key, const std::string& v) {
    // accepts 2^-8 style powers as well as decimals
    if (v.rfind("2^", 0) == 0) return std::ldexp(1.0, to_num<int>(key, v.substr(2)));
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw ConfigInvalid("bad value for " + key);
        return x;
    } catch (const std::logic_error&) {
        throw ConfigInvalid("bad value for " + key + ": " + v);
    }
}

std::vector<int> to_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_num<int>(key, item));
    }
    if (out.empty()) throw ConfigInvalid("empty list for " + key);
    return out;
}

FieldMode to_field(const std::string& v) {
    if (v == "big") return FieldMode::Big;
    if (v == "test") return FieldMode::Test;
    throw ConfigInvalid("field must be big or test, got " + v);
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::string& field_override) {
    std::map<std::string, std::string> kv;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigInvalid("line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigInvalid("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = section + "." + trim(line.substr(0, eq));
        if (kv.count(key)) throw ConfigInvalid("duplicate key " + key);
        kv[key] = trim(line.substr(eq + 1));
    }

    RunConfig c;
    if (!field_override.empty())
        c.field = to_field(field_override);
    else if (kv.count("run.field"))
        c.field = to_field(kv["run.field"]);
    kv.erase("run.field");
    if (c.field == FieldMode::Test) c.model.quant = QuantParams::test_mode();

    auto& m = c.model;
    auto& q = m.quant;
    for (const auto& [key, v] : kv) {
        if (key == "model.L") m.L = to_num<int>(key, v);
        else if (key == "model.n") m.n = to_num<int>(key, v);
        else if (key == "model.d") m.d = to_num<int>(key, v);
        else if (key == "model.h") m.h = to_num<int>(key, v);
        else if (key == "model.v") m.v = to_num<int>(key, v);
        else if (key == "model.r") m.r = to_num<int>(key, v);
        else if (key == "model.eta") m.eta = to_real(key, v);
        else if (key == "model.ln_eps") m.ln_eps = to_real(key, v);
        else if (key == "model.batch") m.batch = to_num<int>(key, v);
        else if (key == "quant.gamma_bits") q.gamma_bits = to_num<int>(key, v);
        else if (key == "quant.domain_bits") q.domain_bits = to_num<int>(key, v);
        else if (key == "quant.swiglu_zeta_bits") q.swiglu_zeta_bits = to_num<int>(key, v);
        else if (key == "quant.rsqrt_zeta_bits") q.rsqrt_zeta_bits = to_num<int>(key, v);
        else if (key == "quant.radix_bits") q.radix_bits = to_list(key, v);
        else if (key == "quant.exp_scale_bits") q.exp_scale_bits = to_num<int>(key, v);
        else if (key == "run.epochs") c.epochs = to_num<int>(key, v);
        else if (key == "run.seed") c.seed = to_num<std::uint64_t>(key, v);
        else if (key == "run.weights") c.weights = v;
        else if (key == "run.dataset") c.dataset = v;
        else if (key == "run.vocab") c.vocab = v;
        else if (key == "run.out") c.out = v;
        else if (key == "bench.ns") c.bench_ns = to_list(key, v);
        else throw ConfigInvalid("unknown key " + key);
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path, const std::string& field_override) {
    std::ifstream f(path);
    if (!f) throw IOFailure("cannot open config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), field_override);
}

void RunConfig::validate() const {
    model.validate(field_bits());
    if (epochs < 1 || epochs > 10000) throw ConfigInvalid("epochs out of range");
    for (int n : bench_ns)
        if (!is_pow2(n) || n > 4096) throw ConfigInvalid("bench n must be a power of two");
}

std::string RunConfig::public_text() const {
    std::ostringstream s;
    s.precision(17);
    s << "[model]\nL = " << model.L << "\nn = " << model.n << "\nd = " << model.d << "\nh = " << model.h
      << "\nv = " << model.v << "\nr = " << model.r << "\neta = " << model.eta << "\nln_eps = " << model.ln_eps
      << "\nbatch = " << model.batch << "\n[quant]\ngamma_bits = " << model.quant.gamma_bits
      << "\ndomain_bits = " << model.quant.domain_bits << "\nswiglu_zeta_bits = " << model.quant.swiglu_zeta_bits
      << "\nrsqrt_zeta_bits = " << model.quant.rsqrt_zeta_bits << "\nradix_bits = ";
    for (std::size_t i = 0; i < model.quant.radix_bits.size(); ++i)
        s << (i ? "," : "") << model.quant.radix_bits[i];
    s << "\nexp_scale_bits = " << model.quant.exp_scale_bits << "\n[run]\nepochs = " << epochs
      << "\nfield = " << (field == FieldMode::Big ? "big" : "test") << "\n";
    return s.str();
}

Digest RunConfig::hash() const {
    const std::string t = "zklora-config-v1\n" + public_text();
    return sha3_256({reinterpret_cast<const std::uint8_t*>(t.data()), t.size()});
}

RunConfig RunConfig::from_public_text(const std::string& text) { return parse(text); }

}  // namespace zkl
