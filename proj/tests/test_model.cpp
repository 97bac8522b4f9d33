#include <gtest/gtest.h>

#include <cmath>

#include "model_util.hpp"
#include "test_util.hpp"

using namespace zkl;
using namespace zkl::testing;

namespace {

using Toy = Toy61;
using TF = Fp61;

double max_abs(const Mat& a) { return a.cwiseAbs().maxCoeff(); }

RealAdapters random_adapters(const ModelConfig& cfg, std::uint64_t seed) {
    RealAdapters a = init_adapters(cfg, seed);
    Drbg rng("zkl.test.b", seed);
    for (auto& b : a.B)
        for (Eigen::Index i = 0; i < b.size(); ++i)
            b.data()[i] = std::ldexp(std::round(std::ldexp((static_cast<double>(rng() >> 11) * 0x1p-53 - 0.5) * 0.5, 16)), -16);
    return a;
}

double loss_of(const ModelConfig& cfg, const RealWeights& w, const RealAdapters& a, const Mat& x, const Mat& y) {
    return reference_forward(cfg, w, a, x, y).loss;
}

// Central differences of the reference loss against every adapter entry.
void check_fd(const ModelConfig& cfg, const RealWeights& w, RealAdapters a, const Mat& x, const Mat& y) {
    const auto g = reference_backward(cfg, w, a, reference_forward(cfg, w, a, x, y), y);
    const double h = 1e-4;
    double worst = 0;
    for (int l = 0; l < cfg.L; ++l) {
        for (auto [mats, grads] : {std::pair{&a.A, &g.dA}, std::pair{&a.B, &g.dB}}) {
            Mat& m = (*mats)[l];
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                const double keep = m.data()[i];
                m.data()[i] = keep + h;
                const double lp = loss_of(cfg, w, a, x, y);
                m.data()[i] = keep - h;
                const double lm = loss_of(cfg, w, a, x, y);
                m.data()[i] = keep;
                const double fd = (lp - lm) / (2 * h);
                const double an = (*grads)[l].data()[i];
                const double rel = std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-6});
                worst = std::max(worst, rel);
                EXPECT_LE(rel, 1e-3) << "layer " << l << " entry " << i << " fd " << fd << " analytic " << an;
            }
        }
    }
    ::testing::Test::RecordProperty("worst_rel", std::to_string(worst));
}

TEST(Reference, FiniteDifferencesDefaultConfig) {
    ModelConfig cfg;
    auto w = synthetic_weights(cfg, 1);
    auto [x, y] = toy_sample(cfg, w, 2);
    check_fd(cfg, w, random_adapters(cfg, 3), x, y);
}

TEST(Reference, FiniteDifferencesZeroInit) {
    ModelConfig cfg;
    auto w = synthetic_weights(cfg, 4);
    auto [x, y] = toy_sample(cfg, w, 5);
    auto a = init_adapters(cfg, 6);
    check_fd(cfg, w, a, x, y);
    const auto g = reference_backward(cfg, w, a, reference_forward(cfg, w, a, x, y), y);
    for (int l = 0; l < cfg.L; ++l) EXPECT_EQ(max_abs(g.dA[l]), 0.0);
}

TEST(Reference, PerfectPredictionGivesZeroGradients) {
    ModelConfig cfg;
    auto w = synthetic_weights(cfg, 7);
    auto [x, y] = toy_sample(cfg, w, 8);
    auto a = random_adapters(cfg, 9);
    auto t = reference_forward(cfg, w, a, x, y);
    const auto g = reference_backward(cfg, w, a, t, t.yhat);
    for (int l = 0; l < cfg.L; ++l) {
        EXPECT_LT(max_abs(g.dA[l]), 1e-15);
        EXPECT_LT(max_abs(g.dB[l]), 1e-15);
    }
}

TEST(Reference, GradientShapes) {
    for (int r : {1, 2, 4}) {
        ModelConfig cfg;
        cfg.r = r;
        auto w = synthetic_weights(cfg, 10);
        auto [x, y] = toy_sample(cfg, w, 11);
        auto a = random_adapters(cfg, 12);
        const auto g = reference_backward(cfg, w, a, reference_forward(cfg, w, a, x, y), y);
        for (int l = 0; l < cfg.L; ++l) {
            EXPECT_EQ(g.dA[l].rows(), r);
            EXPECT_EQ(g.dA[l].cols(), cfg.d);
            EXPECT_EQ(g.dB[l].rows(), cfg.d);
            EXPECT_EQ(g.dB[l].cols(), r);
        }
    }
}

TEST(Loss, Degenerate) {
    Mat y = one_hot({0, 3, 1}, 4);
    EXPECT_EQ(cross_entropy(y, y), 0.0);
    Mat u = Mat::Constant(3, 4, 0.25);
    EXPECT_NEAR(cross_entropy(u, y), 3 * std::log(4.0), 1e-12);
}

TEST(Loss, MatchesDirectSum) {
    Drbg rng("zkl.test.ce", 1);
    Mat p(5, 7);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = 0.05 + static_cast<double>(rng() >> 11) * 0x1p-53;
    for (int i = 0; i < 5; ++i) p.row(i) /= p.row(i).sum();
    std::vector<int> lab{0, 6, 2, 2, 5};
    double expect = 0;
    for (int i = 0; i < 5; ++i) expect -= std::log(p(i, lab[i]));
    EXPECT_NEAR(cross_entropy(p, one_hot(lab, 7)), expect, 1e-12);
}

TEST(Reference, MemorizationLossDecreases) {
    ModelConfig cfg;
    auto w = synthetic_weights(cfg, 13);
    auto [x, y] = toy_sample(cfg, w, 14);
    auto a = init_adapters(cfg, 15);
    double prev = loss_of(cfg, w, a, x, y);
    for (int e = 0; e < 20; ++e) {
        auto t = reference_forward(cfg, w, a, x, y);
        a = reference_update(a, reference_backward(cfg, w, a, t, y), cfg.eta);
        const double l = loss_of(cfg, w, a, x, y);
        EXPECT_LT(l, prev) << "epoch " << e;
        prev = l;
    }
}

TEST(Model, TokenOutOfVocab) {
    ModelConfig cfg;
    auto w = synthetic_weights(cfg, 1);
    EXPECT_THROW(embed_tokens(w, {0, cfg.v}), TokenOutOfVocab);
    EXPECT_THROW(one_hot({-1}, 4), TokenOutOfVocab);
}

TEST(Model, ConfigValidation) {
    ModelConfig cfg;
    EXPECT_NO_THROW(cfg.validate(254));
    cfg.d = 12;
    EXPECT_THROW(cfg.validate(254), ConfigInvalid);
    cfg = ModelConfig{};
    cfg.r = 16;
    EXPECT_THROW(cfg.validate(254), ConfigInvalid);
    EXPECT_NE(ModelConfig{}.hash(), cfg.hash());
}

// ---- quantized model ----

TEST(Quantized, ZeroInitIdentityBitExact) {
    auto cfg = config_for<TF>();
    auto w = synthetic_weights(cfg, 20);
    auto a = init_adapters(cfg, 21);
    auto s = toy_sample(cfg, w, 22);
    auto lora = run_quantized<Toy>(cfg, w, a, {s}, {false, false, true});
    auto base = run_quantized<Toy>(cfg, w, a, {s}, {false, false, false});
    EXPECT_EQ(lora.tape->val(lora.ids.yhat[0]), base.tape->val(base.ids.yhat[0]));
    EXPECT_EQ(lora.tape->val(lora.tape->find("fwd.s0.l1.x")), base.tape->val(base.tape->find("fwd.s0.l1.x")));
}

TEST(Quantized, ForwardMatchesReference) {
    auto cfg = config_for<TF>();
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto w = synthetic_weights(cfg, 100 + seed);
        auto a = random_adapters(cfg, 200 + seed);
        auto s = toy_sample(cfg, w, 300 + seed);
        auto q = run_quantized<Toy>(cfg, w, a, {s}, {false, false, true});
        auto ref = reference_forward(cfg, w, a, s.first, s.second);
        const Mat yh = q.get(q.ids.yhat[0]);
        worst = std::max(worst, max_abs(yh - ref.yhat));
        for (int i = 0; i < cfg.n; ++i) EXPECT_NEAR(yh.row(i).sum(), 1.0, cfg.n * 0x1p-12);
    }
    EXPECT_LE(worst, 0x1p-8);
    ::testing::Test::RecordProperty("worst_yhat", std::to_string(worst));
}

TEST(Quantized, TinyConfigMatchesReference) {
    ModelConfig cfg = config_for<TF>();
    cfg.L = 1;
    cfg.n = 2;
    cfg.d = 2;
    cfg.h = 2;
    cfg.v = 2;
    cfg.r = 1;
    auto w = synthetic_weights(cfg, 30);
    auto a = random_adapters(cfg, 31);
    auto s = toy_sample(cfg, w, 32);
    auto q = run_quantized<Toy>(cfg, w, a, {s});
    auto ref = reference_forward(cfg, w, a, s.first, s.second);
    auto g = reference_backward(cfg, w, a, ref, s.second);
    EXPECT_LE(max_abs(q.get("fwd.s0.l0.q") - ref.layers[0].q), 0x1p-10);
    EXPECT_LE(max_abs(q.get(q.ids.yhat[0]) - ref.yhat), 0x1p-10);
    EXPECT_LE(max_abs(q.get(q.ids.dB[0]) - g.dB[0]), 0x1p-8);
    EXPECT_LE(max_abs(q.get(q.ids.dA[0]) - g.dA[0]), 0x1p-8);
}

template <class B>
void check_quantized_gradients(std::uint64_t seed) {
    auto cfg = config_for<typename B::F>();
    auto w = synthetic_weights(cfg, seed);
    auto a = random_adapters(cfg, seed + 1);
    auto s = toy_sample(cfg, w, seed + 2);
    auto q = run_quantized<B>(cfg, w, a, {s});
    auto ref = reference_forward(cfg, w, a, s.first, s.second);
    auto g = reference_backward(cfg, w, a, ref, s.second);
    auto up = reference_update(a, g, cfg.eta);
    double err = 0, mag = 0;
    for (int l = 0; l < cfg.L; ++l) {
        err = std::max({err, max_abs(q.get(q.ids.dA[l]) - g.dA[l]), max_abs(q.get(q.ids.dB[l]) - g.dB[l])});
        mag = std::max({mag, max_abs(g.dA[l]), max_abs(g.dB[l])});
    }
    ::testing::Test::RecordProperty("grad_err_" + std::to_string(seed), std::to_string(err));
    ::testing::Test::RecordProperty("grad_max_" + std::to_string(seed), std::to_string(mag));
    for (int l = 0; l < cfg.L; ++l) {
        EXPECT_LE(max_abs(q.get(q.ids.dA[l]) - g.dA[l]), 0x1p-8) << "layer " << l;
        EXPECT_LE(max_abs(q.get(q.ids.dB[l]) - g.dB[l]), 0x1p-8) << "layer " << l;
        EXPECT_LE(max_abs(q.get(q.ids.A_out[l]) - up.A[l]), 0x1p-12) << "layer " << l;
        EXPECT_LE(max_abs(q.get(q.ids.B_out[l]) - up.B[l]), 0x1p-12) << "layer " << l;
    }
}

TEST(Quantized, GradientsWithinToleranceToy) {
    for (std::uint64_t s : {40, 50, 60}) check_quantized_gradients<Toy>(s);
}

TEST(Quantized, GradientsWithinToleranceBn254) { check_quantized_gradients<Bn254>(70); }

TEST(Quantized, ZeroLearningRateKeepsAdapters) {
    auto cfg = config_for<TF>();
    cfg.eta = 0;
    auto w = synthetic_weights(cfg, 80);
    auto a = random_adapters(cfg, 81);
    auto q = run_quantized<Toy>(cfg, w, a, {toy_sample(cfg, w, 82)});
    for (int l = 0; l < cfg.L; ++l) {
        EXPECT_EQ(q.tape->val(q.ids.A_out[l]), q.tape->val(q.ids.A[l]));
        EXPECT_EQ(q.tape->val(q.ids.B_out[l]), q.tape->val(q.ids.B[l]));
    }
}

TEST(Quantized, ZeroGradientsKeepAdapters) {
    // B = 0 makes dA exactly zero, so A is unchanged.
    auto cfg = config_for<TF>();
    auto w = synthetic_weights(cfg, 83);
    auto a = init_adapters(cfg, 84);
    auto q = run_quantized<Toy>(cfg, w, a, {toy_sample(cfg, w, 85)});
    for (int l = 0; l < cfg.L; ++l) {
        for (const auto& x : q.tape->val(q.ids.dA[l])) EXPECT_TRUE(x.is_zero());
        EXPECT_EQ(q.tape->val(q.ids.A_out[l]), q.tape->val(q.ids.A[l]));
    }
}

TEST(Quantized, Deterministic) {
    auto cfg = config_for<TF>();
    auto w = synthetic_weights(cfg, 90);
    auto a = random_adapters(cfg, 91);
    auto s = toy_sample(cfg, w, 92);
    auto q1 = run_quantized<Toy>(cfg, w, a, {s});
    auto q2 = run_quantized<Toy>(cfg, w, a, {s});
    ASSERT_EQ(q1.tape->num_tensors(), q2.tape->num_tensors());
    for (std::size_t i = 0; i < q1.tape->num_tensors(); ++i)
        EXPECT_EQ(q1.tape->val(static_cast<int>(i)), q2.tape->val(static_cast<int>(i)));
}

TEST(Quantized, BatchSumsGradients) {
    auto cfg = config_for<TF>();
    cfg.batch = 2;
    auto w = synthetic_weights(cfg, 93);
    auto a = random_adapters(cfg, 94);
    auto s0 = toy_sample(cfg, w, 95), s1 = toy_sample(cfg, w, 96);
    auto q = run_quantized<Toy>(cfg, w, a, {s0, s1});
    for (int l = 0; l < cfg.L; ++l) {
        Mat expect = q.get("bwd.s0.l" + std::to_string(l) + ".dA") + q.get("bwd.s1.l" + std::to_string(l) + ".dA");
        EXPECT_EQ(max_abs(q.get(q.ids.dA[l]) - expect), 0.0);
    }
}

}  // namespace
