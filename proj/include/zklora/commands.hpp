#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "pipeline.hpp"

namespace zkl {

// Files written by setup, relative to the output directory.
std::vector<std::string> setup_file_names(const RunConfig& rc);

std::vector<std::string> cmd_setup(const RunConfig& rc);

struct ProveResult {
    std::string bundle_path;
    std::size_t bundle_bytes = 0;
    std::vector<EpochTiming> timing;
    std::vector<double> losses;
};
ProveResult cmd_prove(const RunConfig& rc);

// Reads only the bundle, the key file and the table files; the config supplies the expected hash and v.
VerifyReport cmd_verify(const RunConfig& rc, const std::string& bundle_path);
void print_report(std::ostream& os, const VerifyReport& r, bool big_field);

struct BenchRow {
    int n = 0;
    double prove = 0, verify = 0, commit = 0, prove_fwd = 0, prove_bwd = 0, prove_upd = 0, prove_lookup = 0;
    std::size_t bundle_bytes = 0, commitment_bytes = 0;
    double peak_mb = 0;
    bool accepted = false;
};
std::vector<BenchRow> cmd_bench(const RunConfig& rc, std::ostream& os);

}  // namespace zkl
