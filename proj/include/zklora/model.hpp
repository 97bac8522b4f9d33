#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "quant.hpp"
#include "transcript.hpp"

namespace zkl {

struct ModelConfig {
    int L = 2, n = 8, d = 16, h = 32, v = 32, r = 2;
    double ln_eps = 1e-5;
    double eta = 1.0 / 256;
    int batch = 1;
    QuantParams quant;

    void validate(int field_bits) const;
    // Stable text form; its hash binds transcripts and weight files.
    std::string canonical() const;
    Digest hash() const;
};

using Mat = Eigen::MatrixXd;
using RowVec = Eigen::RowVectorXd;

struct RealLayer {
    Mat wq, wk, wv, wp;  // d x d
    Mat wgate, wup;      // h x d
    Mat wdown;           // d x h
    RowVec g1, b1, g2, b2;
};

struct RealWeights {
    Mat embed;  // v x d, indexes tokens to X_0
    std::vector<RealLayer> layers;
    RowVec gf, bf;
    Mat head;  // d x v
};

struct RealAdapters {
    std::vector<Mat> A;  // r x d
    std::vector<Mat> B;  // d x r
};

struct RealLayerTrace {
    Mat x, xp, q, k, v, wvp, s, p, m, o, r, rp, g, u, phi, hh, f;
    Mat mu1, s1, mu2, s2;  // LayerNorm row means and 1 / sigma, n x 1
};

struct RealTrace {
    std::vector<RealLayerTrace> layers;
    Mat xl, xf, muf, sf, logits, yhat;
    double loss = 0;
};

struct RealGrads {
    std::vector<Mat> dA, dB, dWv;
    Mat dlogits;
};

// Frozen tensors committed at setup, in declaration order (the embedding is not among them).
struct TensorSpec {
    std::string name;
    int rows, cols;
};
std::vector<TensorSpec> frozen_specs(const ModelConfig& cfg);
std::vector<Mat> frozen_tensors(const RealWeights& w);
RealWeights weights_from_frozen(const ModelConfig& cfg, const Mat& embed, const std::vector<Mat>& frozen);

// Synthetic frozen weights and LoRA initialization (A uniform in (-1/sqrt r, 1/sqrt r), B = 0).
// Real values are drawn on the fixed-point grid so the reference and the quantized model agree on inputs.
RealWeights synthetic_weights(const ModelConfig& cfg, std::uint64_t seed);
RealAdapters init_adapters(const ModelConfig& cfg, std::uint64_t seed);

Mat embed_tokens(const RealWeights& w, const std::vector<int>& tokens);
Mat one_hot(const std::vector<int>& labels, int v);

double cross_entropy(const Mat& yhat, const Mat& y);

RealTrace reference_forward(const ModelConfig& cfg, const RealWeights& w, const RealAdapters& a, const Mat& x0,
                            const Mat& y);
RealGrads reference_backward(const ModelConfig& cfg, const RealWeights& w, const RealAdapters& a,
                             const RealTrace& tr, const Mat& y);
RealAdapters reference_update(const RealAdapters& a, const RealGrads& g, double eta);

}  // namespace zkl
