#include "zklora/dataset.hpp"

#include <fstream>
#include <sstream>

#include "zklora/errors.hpp"

namespace zkl {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IOFailure("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

Vocab Vocab::from_lines(const std::string& text, int v) {
    Vocab voc;
    voc.ids_[kUnknown] = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.find_first_of(" \t") != std::string::npos) throw ConfigInvalid("vocab entry contains whitespace: " + line);
        if (voc.ids_.count(line)) throw ConfigInvalid("duplicate vocab entry: " + line);
        voc.ids_[line] = voc.size();
        voc.words_.push_back(line);
    }
    if (voc.size() > v)
        throw VocabTooLarge("vocab has " + std::to_string(voc.size()) + " ids with <unk>, model v = " + std::to_string(v));
    return voc;
}

Vocab Vocab::load(const std::string& path, int v) { return from_lines(slurp(path), v); }

int Vocab::id(const std::string& word) const {
    auto it = ids_.find(word);
    return it == ids_.end() ? 0 : it->second;
}

std::vector<int> tokenize(const std::string& text, const Vocab& vocab) {
    std::istringstream in(text);
    std::vector<int> out;
    std::string w;
    while (in >> w) out.push_back(vocab.id(w));
    return out;
}

std::vector<DatasetBatch> make_batches(const std::vector<int>& tokens, int n) {
    std::vector<DatasetBatch> out;
    for (std::size_t s = 0; s + static_cast<std::size_t>(n) < tokens.size(); s += static_cast<std::size_t>(n)) {
        DatasetBatch b;
        b.x.assign(tokens.begin() + static_cast<std::ptrdiff_t>(s), tokens.begin() + static_cast<std::ptrdiff_t>(s + n));
        b.labels.assign(tokens.begin() + static_cast<std::ptrdiff_t>(s + 1),
                        tokens.begin() + static_cast<std::ptrdiff_t>(s + n + 1));
        out.push_back(std::move(b));
    }
    if (out.empty()) throw EmptyDataset("fewer than n + 1 tokens");
    return out;
}

std::vector<DatasetBatch> ingest_dataset(const std::string& path, const std::string& vocab_path, int n, int v) {
    const Vocab vocab = Vocab::load(vocab_path, v);
    return make_batches(tokenize(slurp(path), vocab), n);
}

}  // namespace zkl
