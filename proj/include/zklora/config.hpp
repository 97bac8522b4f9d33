#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model.hpp"

namespace zkl {

enum class FieldMode { Big, Test };

struct RunConfig {
    ModelConfig model;
    int epochs = 1;
    std::uint64_t seed = 1;
    FieldMode field = FieldMode::Big;
    std::string weights;  // empty: synthetic weights from the seed
    std::string dataset, vocab;
    std::string out = "zklora_out";
    std::vector<int> bench_ns{4, 8, 16};

    // Text format: "key = value" lines, "[section]" headers, '#' comments. Sections: model, quant, run, bench.
    // field_override (big|test) applies before the quant defaults are chosen.
    static RunConfig parse(const std::string& text, const std::string& field_override = "");
    static RunConfig load(const std::string& path, const std::string& field_override = "");

    void validate() const;
    int field_bits() const { return field == FieldMode::Big ? 254 : 61; }
    // Public statement: model shape, quantization, epoch count and field. Paths and seed stay out.
    std::string public_text() const;
    Digest hash() const;
    static RunConfig from_public_text(const std::string& text);
};

}  // namespace zkl
