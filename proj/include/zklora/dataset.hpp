#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace zkl {

// Id 0 is the reserved out-of-vocabulary token; vocab file words take ids 1, 2, ...
class Vocab {
public:
    static constexpr const char* kUnknown = "<unk>";

    Vocab() : words_{kUnknown} {}
    static Vocab from_lines(const std::string& text, int v);
    static Vocab load(const std::string& path, int v);

    int id(const std::string& word) const;
    const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
    int size() const { return static_cast<int>(words_.size()); }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, int> ids_;
};

struct DatasetBatch {
    std::vector<int> x;       // n tokens
    std::vector<int> labels;  // n next tokens; row i of the one-hot Y has its 1 at labels[i]
};

std::vector<int> tokenize(const std::string& text, const Vocab& vocab);
// Windows of n + 1 consecutive tokens with stride n.
std::vector<DatasetBatch> make_batches(const std::vector<int>& tokens, int n);
std::vector<DatasetBatch> ingest_dataset(const std::string& path, const std::string& vocab_path, int n, int v);

}  // namespace zkl
