#pragma once

#include <string>
#include <vector>

#include "gadgets.hpp"
#include "model.hpp"

namespace zkl {

template <class F>
std::vector<F> quantize_mat(const Mat& m, const QuantParams& q) {
    std::vector<F> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(quantize_real<F>(m(i, j), q));
    return out;
}

template <class F>
Mat dequantize_mat(const std::vector<F>& v, int rows, int cols, const QuantParams& q) {
    if (v.size() != static_cast<std::size_t>(rows) * cols) throw DimensionMismatch("dequantize_mat");
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = dequantize(v[static_cast<std::size_t>(i) * cols + j], q);
    return m;
}

// One training sample in fixed point: X_0 (n x d) and the one-hot labels Y (n x v) at scale gamma.
template <class F>
struct Sample {
    std::vector<F> x0, y;
};

struct BuildOptions {
    bool backward = true;
    bool update = true;
    bool adapters = true;  // false builds the frozen base model (V = X' W_V)
};

// Tensor ids of one epoch on the tape.
struct EpochIds {
    std::vector<int> frozen, A, B, A_out, B_out;
    std::vector<int> x0, y, yhat, dA, dB;
};

// The fixed schedule of one epoch: forward, backward and update for every sample, as gadgets on one tape.
// The prover passes committed frozen weights and adapters with values plus the samples; the verifier
// passes commitments only and no samples.
template <class B>
class ModelBuilder {
public:
    using F = typename B::F;
    using Terms = std::vector<std::pair<F, int>>;

    ModelBuilder(Tape<B>& t, const ModelConfig& cfg) : t_(t), cfg_(cfg), gb_(cfg.quant.gamma_bits) {}

    EpochIds build(const std::vector<Committed<B>>& frozen, const std::vector<Committed<B>>& A,
                   const std::vector<Committed<B>>& Bm, const std::vector<Sample<F>>& samples,
                   BuildOptions opt = {}) {
        const auto specs = frozen_specs(cfg_);
        if (frozen.size() != specs.size() || A.size() != static_cast<std::size_t>(cfg_.L) ||
            Bm.size() != static_cast<std::size_t>(cfg_.L))
            throw ShapeMismatch("epoch inputs");
        if (t_.prover() && samples.size() != static_cast<std::size_t>(cfg_.batch))
            throw ShapeMismatch("batch size");
        EpochIds ids;
        for (std::size_t i = 0; i < specs.size(); ++i)
            ids.frozen.push_back(t_.adopt(specs[i].name, specs[i].rows, specs[i].cols, frozen[i]));
        for (int l = 0; l < cfg_.L; ++l) {
            ids.A.push_back(t_.adopt("l" + std::to_string(l) + ".A", cfg_.r, cfg_.d, A[l]));
            ids.B.push_back(t_.adopt("l" + std::to_string(l) + ".B", cfg_.d, cfg_.r, Bm[l]));
        }
        w_ = &ids.frozen;
        std::vector<std::vector<int>> dAs(cfg_.L), dBs(cfg_.L);
        for (int s = 0; s < cfg_.batch; ++s) {
            const std::string sp = "s" + std::to_string(s);
            std::vector<F> xv, yv;
            if (t_.prover()) {
                xv = samples[s].x0;
                yv = samples[s].y;
            }
            const int x0 = t_.tensor(sp + ".x0", cfg_.n, cfg_.d, std::move(xv));
            const int y = t_.tensor(sp + ".y", cfg_.n, cfg_.v, std::move(yv));
            ids.x0.push_back(x0);
            ids.y.push_back(y);
            Forward fw = forward("fwd." + sp, x0, ids, opt.adapters);
            ids.yhat.push_back(fw.yhat);
            if (!opt.backward) continue;
            backward("bwd." + sp, fw, y, ids);
            for (int l = 0; l < cfg_.L; ++l) {
                dAs[l].push_back(t_.find("bwd." + sp + ".l" + std::to_string(l) + ".dA"));
                dBs[l].push_back(t_.find("bwd." + sp + ".l" + std::to_string(l) + ".dB"));
            }
        }
        if (!opt.backward) return ids;
        for (int l = 0; l < cfg_.L; ++l) {
            const std::string lp = "l" + std::to_string(l);
            ids.dA.push_back(sum(dAs[l], "bwd.sum." + lp + ".dA"));
            ids.dB.push_back(sum(dBs[l], "bwd.sum." + lp + ".dB"));
        }
        if (!opt.update) return ids;
        const F eta = F::from_i64(quantize_int(cfg_.eta, gb_, std::int64_t{1} << 40));
        for (int l = 0; l < cfg_.L; ++l) {
            const std::string lp = "upd." + std::string("l") + std::to_string(l);
            ids.A_out.push_back(step(ids.A[l], ids.dA[l], eta, lp + ".A"));
            ids.B_out.push_back(step(ids.B[l], ids.dB[l], eta, lp + ".B"));
        }
        return ids;
    }

private:
    struct Ln {
        int out, xhat, sb, gb;
    };
    struct LayerFwd {
        int xp, q, k, v, wvp, p, r, rp, g, u, phi;
        Ln ln1, ln2;
    };
    struct Forward {
        std::vector<LayerFwd> layers;
        Ln lnf;
        int yhat;
    };

    int W(int l, int k) const { return (*w_)[static_cast<std::size_t>(l) * 11 + k]; }
    int Wf(int k) const { return (*w_)[static_cast<std::size_t>(cfg_.L) * 11 + k]; }
    enum { WQ, WK, WV, WP, WGATE, WUP, WDOWN, G1, B1, G2, B2 };

    int ones(int rows, int cols) {
        return t_.public_tensor("ones", rows, cols, std::vector<F>(static_cast<std::size_t>(rows) * cols, F::one()));
    }
    int mm(int a, int b, const std::string& w) { return g_rescale(t_, g_matmul(t_, a, b, w + ".wide"), gb_, w); }
    int had(int a, int b, const std::string& w) { return g_rescale(t_, g_hadamard(t_, a, b, w + ".wide"), gb_, w); }
    int add(const Terms& terms, const std::string& w) { return g_matadd(t_, terms, w); }
    int tr(int a, const std::string& w) { return g_transpose(t_, a, w); }
    int scale(int a, const F& c, const std::string& w) { return g_rescale(t_, add({{c, a}}, w + ".wide"), gb_, w); }
    int sum(const std::vector<int>& xs, const std::string& w) {
        if (xs.size() == 1) return xs[0];
        Terms terms;
        for (int x : xs) terms.emplace_back(F::one(), x);
        return add(terms, w);
    }
    int step(int p, int g, const F& eta, const std::string& w) {
        const int d = scale(g, eta, w + ".step");
        return add({{F::one(), p}, {-F::one(), d}}, w);
    }
    // Row mean as a column: sum through a ones vector, then an exact power-of-two division.
    int row_mean(int x, const std::string& w) {
        const int s = g_matmul(t_, x, ones(t_.cols(x), 1), w + ".sum");
        return g_rescale(t_, s, log2_exact(t_.cols(x)), w);
    }
    int bcast_col(int c, int cols, const std::string& w) { return g_matmul(t_, c, ones(1, cols), w); }
    int bcast_row(int r, int rows, const std::string& w) { return g_matmul(t_, ones(rows, 1), r, w); }

    Ln layer_norm(int x, int g, int b, const std::string& w) {
        const int n = t_.rows(x), d = t_.cols(x);
        const int mu = row_mean(x, w + ".mean");
        const int c = add({{F::one(), x}, {-F::one(), bcast_col(mu, d, w + ".mean_rows")}}, w + ".centered");
        const int var = row_mean(had(c, c, w + ".sq"), w + ".var");
        const int s = g_rsqrt(t_, var, w + ".rsqrt");
        Ln ln;
        ln.sb = bcast_col(s, d, w + ".rsqrt_rows");
        ln.xhat = had(c, ln.sb, w + ".xhat");
        ln.gb = bcast_row(g, n, w + ".gamma_rows");
        const int bb = bcast_row(b, n, w + ".beta_rows");
        ln.out = add({{F::one(), had(ln.xhat, ln.gb, w + ".scaled")}, {F::one(), bb}}, w);
        return ln;
    }
    int layer_norm_back(const Ln& ln, int dout, const std::string& w) {
        const int d = t_.cols(dout);
        const int g = had(dout, ln.gb, w + ".g");
        const int m1 = bcast_col(row_mean(g, w + ".m1"), d, w + ".m1_rows");
        const int m2 = bcast_col(row_mean(had(g, ln.xhat, w + ".gx"), w + ".m2"), d, w + ".m2_rows");
        const int inner =
            add({{F::one(), g}, {-F::one(), m1}, {-F::one(), had(ln.xhat, m2, w + ".xm2")}}, w + ".inner");
        return had(inner, ln.sb, w);
    }
    int softmax_back(int p, int dp, const std::string& w) {
        const int e = had(dp, p, w + ".e");
        const int rs = g_matmul(t_, e, ones(t_.cols(e), 1), w + ".rowsum");
        const int diff = add({{F::one(), dp}, {-F::one(), bcast_col(rs, t_.cols(e), w + ".rowsum_rows")}}, w + ".diff");
        return had(p, diff, w);
    }
    F inv_sqrt_d() const {
        return F::from_i64(quantize_int(1.0 / std::sqrt(static_cast<double>(cfg_.d)), gb_, std::int64_t{1} << 40));
    }

    Forward forward(const std::string& sp, int x0, const EpochIds& ids, bool adapters) {
        Forward fw;
        int x = x0;
        for (int l = 0; l < cfg_.L; ++l) {
            const std::string p = sp + ".l" + std::to_string(l);
            LayerFwd f;
            f.ln1 = layer_norm(x, W(l, G1), W(l, B1), p + ".ln1");
            f.xp = f.ln1.out;
            f.q = mm(f.xp, W(l, WQ), p + ".q");
            f.k = mm(f.xp, W(l, WK), p + ".k");
            if (adapters) {
                const int ba = mm(ids.B[l], ids.A[l], p + ".ba");
                f.wvp = add({{F::one(), W(l, WV)}, {F::one(), ba}}, p + ".wv_adapted");
            } else {
                f.wvp = W(l, WV);
            }
            f.v = mm(f.xp, f.wvp, p + ".v");
            const int s = mm(f.q, tr(f.k, p + ".kt"), p + ".scores");
            const int sc = scale(s, inv_sqrt_d(), p + ".scores_scaled");
            f.p = g_softmax(t_, sc, cfg_.n, p + ".attn");
            const int m = mm(f.p, f.v, p + ".mix");
            const int o = mm(m, W(l, WP), p + ".o");
            f.r = add({{F::one(), x}, {F::one(), o}}, p + ".r");
            f.ln2 = layer_norm(f.r, W(l, G2), W(l, B2), p + ".ln2");
            f.rp = f.ln2.out;
            f.g = mm(f.rp, tr(W(l, WGATE), p + ".wgate_t"), p + ".gate");
            f.u = mm(f.rp, tr(W(l, WUP), p + ".wup_t"), p + ".up");
            f.phi = g_swiglu(t_, f.g, false, p + ".silu");
            const int hh = had(f.phi, f.u, p + ".glu");
            const int ff = mm(hh, tr(W(l, WDOWN), p + ".wdown_t"), p + ".down");
            x = add({{F::one(), f.r}, {F::one(), ff}}, p + ".x");
            fw.layers.push_back(f);
        }
        fw.lnf = layer_norm(x, Wf(0), Wf(1), sp + ".lnf");
        const int z = mm(fw.lnf.out, Wf(2), sp + ".logits");
        fw.yhat = g_softmax(t_, z, cfg_.n, sp + ".yhat");
        return fw;
    }

    void backward(const std::string& sp, const Forward& fw, int y, const EpochIds& ids) {
        const int dz = add({{F::one(), fw.yhat}, {-F::one(), y}}, sp + ".dlogits");
        const int dxf = mm(dz, tr(Wf(2), sp + ".head_t"), sp + ".dxf");
        int dx = layer_norm_back(fw.lnf, dxf, sp + ".lnf_back");
        for (int l = cfg_.L - 1; l >= 0; --l) {
            const std::string p = sp + ".l" + std::to_string(l);
            const LayerFwd& f = fw.layers[l];
            const int dh = mm(dx, W(l, WDOWN), p + ".dglu");
            const int du = had(dh, f.phi, p + ".dup");
            const int dphi = had(dh, f.u, p + ".dsilu");
            const int dg = had(dphi, g_swiglu(t_, f.g, true, p + ".silu_prime"), p + ".dgate");
            const int drp = add({{F::one(), mm(dg, W(l, WGATE), p + ".drp_gate")}, {F::one(), mm(du, W(l, WUP), p + ".drp_up")}},
                                p + ".drp");
            const int dr = add({{F::one(), dx}, {F::one(), layer_norm_back(f.ln2, drp, p + ".ln2_back")}}, p + ".dr");
            const int dm = mm(dr, tr(W(l, WP), p + ".wp_t"), p + ".dmix");
            const int dv = mm(tr(f.p, p + ".attn_t"), dm, p + ".dv");
            const int dwv = mm(tr(f.xp, p + ".xp_t"), dv, p + ".dwv");
            mm(dwv, tr(ids.A[l], p + ".A_t"), p + ".dB");
            mm(tr(ids.B[l], p + ".B_t"), dwv, p + ".dA");
            if (l == 0) break;
            const int dp = mm(dm, tr(f.v, p + ".v_t"), p + ".dattn");
            const int ds = scale(softmax_back(f.p, dp, p + ".dscores_scaled"), inv_sqrt_d(), p + ".dscores");
            const int dq = mm(ds, f.k, p + ".dq");
            const int dk = mm(tr(ds, p + ".dscores_t"), f.q, p + ".dk");
            const int dxp = add({{F::one(), mm(dq, tr(W(l, WQ), p + ".wq_t"), p + ".dxp_q")},
                                 {F::one(), mm(dk, tr(W(l, WK), p + ".wk_t"), p + ".dxp_k")},
                                 {F::one(), mm(dv, tr(f.wvp, p + ".wv_adapted_t"), p + ".dxp_v")}},
                                p + ".dxp");
            dx = add({{F::one(), dr}, {F::one(), layer_norm_back(f.ln1, dxp, p + ".ln1_back")}}, p + ".dx");
        }
    }

    Tape<B>& t_;
    const ModelConfig& cfg_;
    int gb_;
    const std::vector<int>* w_ = nullptr;
};

}  // namespace zkl
