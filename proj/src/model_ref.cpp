#include <sstream>

#include "zklora/model.hpp"

namespace zkl {

void ModelConfig::validate(int field_bits) const {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigInvalid(what);
    };
    need(L >= 1 && L <= 64, "layer count out of range");
    for (auto [x, name] : {std::pair{n, "n"}, {d, "d"}, {h, "h"}, {v, "v"}, {r, "r"}})
        need(is_pow2(x) && x <= 4096, std::string(name) + " must be a power of two");
    need(d >= 2, "d must be at least 2");
    need(r < d, "rank must be below d");
    need(ln_eps > 0 && ln_eps < 1, "ln_eps out of range");
    need(eta >= 0 && eta < 1, "eta out of range");
    need(batch >= 1 && batch <= 64, "batch out of range");
    quant.validate(field_bits);
    need(log2_exact(d) < quant.domain_bits, "d too large for the residue table");
}

std::string ModelConfig::canonical() const {
    std::ostringstream s;
    s.precision(17);
    s << "L=" << L << ";n=" << n << ";d=" << d << ";h=" << h << ";v=" << v << ";r=" << r << ";eps=" << ln_eps
      << ";eta=" << eta << ";batch=" << batch << ";gamma=" << quant.gamma_bits << ";domain=" << quant.domain_bits
      << ";zs=" << quant.swiglu_zeta_bits << ";zr=" << quant.rsqrt_zeta_bits << ";exp=" << quant.exp_scale_bits
      << ";radix=";
    for (int b : quant.radix_bits) s << b << ",";
    return s.str();
}

Digest ModelConfig::hash() const {
    const std::string c = canonical();
    return sha3_256({reinterpret_cast<const std::uint8_t*>(c.data()), c.size()});
}

namespace {

// Uniform in (-a, a), rounded to the fixed-point grid.
class GridSampler {
public:
    GridSampler(const char* label, std::uint64_t seed, int bits) : rng_(label, seed), bits_(bits) {}
    double operator()(double a) {
        const double u = static_cast<double>(rng_() >> 11) * 0x1p-53;
        return std::ldexp(std::round(std::ldexp((2 * u - 1) * a, bits_)), -bits_);
    }
    Mat mat(int rows, int cols, double a) {
        Mat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = (*this)(a);
        return m;
    }
    RowVec vec(int n, double center, double a) {
        RowVec x(n);
        for (int i = 0; i < n; ++i) x(i) = center + (*this)(a);
        return x;
    }

private:
    Drbg rng_;
    int bits_;
};

struct LnCache {
    Mat out, xhat, mu, s;
};

LnCache layer_norm(const Mat& x, const RowVec& g, const RowVec& b, double eps) {
    LnCache c;
    const auto n = x.rows();
    c.mu = x.rowwise().mean();
    Mat cen = x - c.mu * RowVec::Ones(x.cols());
    c.s.resize(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) c.s(i) = 1.0 / std::sqrt(cen.row(i).squaredNorm() / x.cols() + eps);
    c.xhat = c.s.asDiagonal() * cen;
    c.out = (c.xhat.array().rowwise() * g.array()).matrix() + Mat::Ones(n, 1) * b;
    return c;
}

Mat layer_norm_back(const Mat& x, const Mat& mu, const Mat& s, const RowVec& g, const Mat& dout) {
    Mat xhat = s.asDiagonal() * (x - mu * RowVec::Ones(x.cols()));
    Mat gd = (dout.array().rowwise() * g.array()).matrix();
    Mat m1 = gd.rowwise().mean();
    Mat m2 = (gd.array() * xhat.array()).matrix().rowwise().mean();
    Mat inner = gd - m1 * RowVec::Ones(x.cols()) - (xhat.array().colwise() * m2.col(0).array()).matrix();
    return s.asDiagonal() * inner;
}

Mat softmax_rows(const Mat& z) {
    Mat p(z.rows(), z.cols());
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        Eigen::RowVectorXd e = (z.row(i).array() - z.row(i).maxCoeff()).exp();
        p.row(i) = e / e.sum();
    }
    return p;
}

Mat softmax_back(const Mat& p, const Mat& dp) {
    Mat t = (dp.array() * p.array()).matrix().rowwise().sum();
    return (p.array() * (dp - t * RowVec::Ones(p.cols())).array()).matrix();
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

RealWeights synthetic_weights(const ModelConfig& cfg, std::uint64_t seed) {
    GridSampler g("zkl.weights", seed, cfg.quant.gamma_bits);
    const double sd = 1.0 / std::sqrt(static_cast<double>(cfg.d)), sh = 1.0 / std::sqrt(static_cast<double>(cfg.h));
    RealWeights w;
    w.embed = g.mat(cfg.v, cfg.d, 1.5);
    for (int l = 0; l < cfg.L; ++l) {
        RealLayer ly;
        ly.wq = g.mat(cfg.d, cfg.d, sd);
        ly.wk = g.mat(cfg.d, cfg.d, sd);
        ly.wv = g.mat(cfg.d, cfg.d, sd);
        ly.wp = g.mat(cfg.d, cfg.d, sd);
        ly.wgate = g.mat(cfg.h, cfg.d, sd);
        ly.wup = g.mat(cfg.h, cfg.d, sd);
        ly.wdown = g.mat(cfg.d, cfg.h, sh);
        ly.g1 = g.vec(cfg.d, 1.0, 0.1);
        ly.b1 = g.vec(cfg.d, 0.0, 0.1);
        ly.g2 = g.vec(cfg.d, 1.0, 0.1);
        ly.b2 = g.vec(cfg.d, 0.0, 0.1);
        w.layers.push_back(std::move(ly));
    }
    w.gf = g.vec(cfg.d, 1.0, 0.1);
    w.bf = g.vec(cfg.d, 0.0, 0.1);
    w.head = g.mat(cfg.d, cfg.v, 1.0);
    return w;
}

std::vector<TensorSpec> frozen_specs(const ModelConfig& cfg) {
    std::vector<TensorSpec> s;
    for (int l = 0; l < cfg.L; ++l) {
        const std::string p = "l" + std::to_string(l) + ".";
        for (const char* m : {"wq", "wk", "wv", "wp"}) s.push_back({p + m, cfg.d, cfg.d});
        s.push_back({p + "wgate", cfg.h, cfg.d});
        s.push_back({p + "wup", cfg.h, cfg.d});
        s.push_back({p + "wdown", cfg.d, cfg.h});
        for (const char* m : {"g1", "b1", "g2", "b2"}) s.push_back({p + m, 1, cfg.d});
    }
    s.push_back({"gf", 1, cfg.d});
    s.push_back({"bf", 1, cfg.d});
    s.push_back({"head", cfg.d, cfg.v});
    return s;
}

std::vector<Mat> frozen_tensors(const RealWeights& w) {
    std::vector<Mat> out;
    for (const auto& l : w.layers) {
        for (const Mat* m : {&l.wq, &l.wk, &l.wv, &l.wp, &l.wgate, &l.wup, &l.wdown}) out.push_back(*m);
        for (const RowVec* m : {&l.g1, &l.b1, &l.g2, &l.b2}) out.push_back(*m);
    }
    out.push_back(w.gf);
    out.push_back(w.bf);
    out.push_back(w.head);
    return out;
}

RealWeights weights_from_frozen(const ModelConfig& cfg, const Mat& embed, const std::vector<Mat>& f) {
    const auto specs = frozen_specs(cfg);
    if (f.size() != specs.size()) throw ShapeMismatch("frozen tensor count");
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i].rows() != specs[i].rows || f[i].cols() != specs[i].cols) throw ShapeMismatch(specs[i].name);
    if (embed.rows() != cfg.v || embed.cols() != cfg.d) throw ShapeMismatch("embed");
    RealWeights w;
    w.embed = embed;
    std::size_t k = 0;
    for (int l = 0; l < cfg.L; ++l) {
        RealLayer ly;
        for (Mat* m : {&ly.wq, &ly.wk, &ly.wv, &ly.wp, &ly.wgate, &ly.wup, &ly.wdown}) *m = f[k++];
        for (RowVec* m : {&ly.g1, &ly.b1, &ly.g2, &ly.b2}) *m = f[k++];
        w.layers.push_back(std::move(ly));
    }
    w.gf = f[k++];
    w.bf = f[k++];
    w.head = f[k++];
    return w;
}

RealAdapters init_adapters(const ModelConfig& cfg, std::uint64_t seed) {
    GridSampler g("zkl.adapters", seed, cfg.quant.gamma_bits);
    RealAdapters a;
    for (int l = 0; l < cfg.L; ++l) {
        a.A.push_back(g.mat(cfg.r, cfg.d, 1.0 / std::sqrt(static_cast<double>(cfg.r))));
        a.B.push_back(Mat::Zero(cfg.d, cfg.r));
    }
    return a;
}

Mat embed_tokens(const RealWeights& w, const std::vector<int>& tokens) {
    Mat x(static_cast<Eigen::Index>(tokens.size()), w.embed.cols());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] < 0 || tokens[i] >= w.embed.rows()) throw TokenOutOfVocab("token " + std::to_string(tokens[i]));
        x.row(static_cast<Eigen::Index>(i)) = w.embed.row(tokens[i]);
    }
    return x;
}

Mat one_hot(const std::vector<int>& labels, int v) {
    Mat y = Mat::Zero(static_cast<Eigen::Index>(labels.size()), v);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= v) throw TokenOutOfVocab("label " + std::to_string(labels[i]));
        y(static_cast<Eigen::Index>(i), labels[i]) = 1;
    }
    return y;
}

double cross_entropy(const Mat& yhat, const Mat& y) {
    double l = 0;
    for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index j = 0; j < y.cols(); ++j)
            if (y(i, j) != 0) l -= y(i, j) * std::log(yhat(i, j));
    return l;
}

RealTrace reference_forward(const ModelConfig& cfg, const RealWeights& w, const RealAdapters& a, const Mat& x0,
                            const Mat& y) {
    RealTrace t;
    Mat x = x0;
    const double c = 1.0 / std::sqrt(static_cast<double>(cfg.d));
    for (int l = 0; l < cfg.L; ++l) {
        const auto& W = w.layers[l];
        RealLayerTrace lt;
        lt.x = x;
        auto ln1 = layer_norm(x, W.g1, W.b1, cfg.ln_eps);
        lt.xp = ln1.out;
        lt.mu1 = ln1.mu;
        lt.s1 = ln1.s;
        lt.q = lt.xp * W.wq;
        lt.k = lt.xp * W.wk;
        lt.wvp = W.wv + a.B[l] * a.A[l];
        lt.v = lt.xp * lt.wvp;
        lt.s = c * (lt.q * lt.k.transpose());
        lt.p = softmax_rows(lt.s);
        lt.m = lt.p * lt.v;
        lt.o = lt.m * W.wp;
        lt.r = x + lt.o;
        auto ln2 = layer_norm(lt.r, W.g2, W.b2, cfg.ln_eps);
        lt.rp = ln2.out;
        lt.mu2 = ln2.mu;
        lt.s2 = ln2.s;
        lt.g = lt.rp * W.wgate.transpose();
        lt.u = lt.rp * W.wup.transpose();
        lt.phi = lt.g.unaryExpr([](double z) { return z * sigmoid(z); });
        lt.hh = (lt.phi.array() * lt.u.array()).matrix();
        lt.f = lt.hh * W.wdown.transpose();
        x = lt.r + lt.f;
        t.layers.push_back(std::move(lt));
    }
    t.xl = x;
    auto lnf = layer_norm(x, w.gf, w.bf, cfg.ln_eps);
    t.xf = lnf.out;
    t.muf = lnf.mu;
    t.sf = lnf.s;
    t.logits = t.xf * w.head;
    t.yhat = softmax_rows(t.logits);
    t.loss = cross_entropy(t.yhat, y);
    return t;
}

RealGrads reference_backward(const ModelConfig& cfg, const RealWeights& w, const RealAdapters& a,
                             const RealTrace& t, const Mat& y) {
    RealGrads g;
    g.dA.resize(cfg.L);
    g.dB.resize(cfg.L);
    g.dWv.resize(cfg.L);
    const double c = 1.0 / std::sqrt(static_cast<double>(cfg.d));
    g.dlogits = t.yhat - y;
    Mat dx = layer_norm_back(t.xl, t.muf, t.sf, w.gf, g.dlogits * w.head.transpose());
    for (int l = cfg.L - 1; l >= 0; --l) {
        const auto& W = w.layers[l];
        const auto& lt = t.layers[l];
        Mat dh = dx * W.wdown;
        Mat du = (dh.array() * lt.phi.array()).matrix();
        Mat dphi = (dh.array() * lt.u.array()).matrix();
        Mat dphi_dg = lt.g.unaryExpr([](double z) {
            const double s = sigmoid(z);
            return s * (1 + z * (1 - s));
        });
        Mat dg = (dphi.array() * dphi_dg.array()).matrix();
        Mat drp = dg * W.wgate + du * W.wup;
        Mat dr = dx + layer_norm_back(lt.r, lt.mu2, lt.s2, W.g2, drp);
        Mat dm = dr * W.wp.transpose();
        Mat dv = lt.p.transpose() * dm;
        Mat dp = dm * lt.v.transpose();
        Mat ds = c * softmax_back(lt.p, dp);
        Mat dq = ds * lt.k;
        Mat dk = ds.transpose() * lt.q;
        g.dWv[l] = lt.xp.transpose() * dv;
        g.dB[l] = g.dWv[l] * a.A[l].transpose();
        g.dA[l] = a.B[l].transpose() * g.dWv[l];
        if (l > 0) {
            Mat dxp = dq * W.wq.transpose() + dk * W.wk.transpose() + dv * lt.wvp.transpose();
            dx = dr + layer_norm_back(lt.x, lt.mu1, lt.s1, W.g1, dxp);
        }
    }
    return g;
}

RealAdapters reference_update(const RealAdapters& a, const RealGrads& g, double eta) {
    RealAdapters out = a;
    for (std::size_t l = 0; l < a.A.size(); ++l) {
        out.A[l] -= eta * g.dA[l];
        out.B[l] -= eta * g.dB[l];
    }
    return out;
}

}  // namespace zkl
