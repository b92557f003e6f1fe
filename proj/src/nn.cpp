#include "taei/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace taei::nn {

DenseLayer make_dense(int fan_in, int fan_out, Activation act, Rng& rng) {
    DenseLayer layer;
    layer.weights.resize(fan_in, fan_out);
    layer.bias = VectorXd::Zero(fan_out);
    layer.activation = act;
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
        for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
            layer.weights(i, j) = (2.0 * rng.uniform() - 1.0) * bound;
    return layer;
}

MatrixXd dense_forward(const DenseLayer& layer, const MatrixXd& x) {
    if (x.cols() != layer.weights.rows())
        throw std::invalid_argument("dense_forward: input width " +
                                    std::to_string(x.cols()) + " != fan_in " +
                                    std::to_string(layer.weights.rows()));
    MatrixXd y = (x * layer.weights).rowwise() + layer.bias.transpose();
    if (layer.activation == Activation::ReLU) y = y.cwiseMax(0.0);
    return y;
}

MatrixXd mlp_forward(const Mlp& mlp, const MatrixXd& x, MlpCache* cache) {
    MatrixXd h = x;
    if (cache) {
        cache->input = x;
        cache->pre.clear();
        cache->post.clear();
    }
    for (const auto& layer : mlp.layers) {
        MatrixXd pre = (h * layer.weights).rowwise() + layer.bias.transpose();
        h = (layer.activation == Activation::ReLU) ? pre.cwiseMax(0.0).eval() : pre;
        if (cache) {
            cache->pre.push_back(pre);
            cache->post.push_back(h);
        }
    }
    return h;
}

MlpGrads mlp_backward(const Mlp& mlp, const MlpCache& cache, const MatrixXd& d_out) {
    const std::size_t n = mlp.layers.size();
    MlpGrads grads;
    grads.d_weights.resize(n);
    grads.d_bias.resize(n);
    MatrixXd delta = d_out;
    for (std::size_t li = n; li-- > 0;) {
        const auto& layer = mlp.layers[li];
        if (layer.activation == Activation::ReLU)
            delta = delta.cwiseProduct(
                (cache.pre[li].array() > 0.0).cast<double>().matrix());
        const MatrixXd& in = (li == 0) ? cache.input : cache.post[li - 1];
        grads.d_weights[li] = in.transpose() * delta;
        grads.d_bias[li] = delta.colwise().sum();
        delta = (delta * layer.weights.transpose()).eval();
    }
    grads.d_input = delta;
    return grads;
}

LossResult mse_loss(const MatrixXd& pred, const MatrixXd& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols())
        throw std::invalid_argument("mse_loss: shape mismatch");
    const double b = static_cast<double>(pred.rows());
    MatrixXd diff = pred - target;
    LossResult r;
    r.loss = diff.squaredNorm() / b;
    r.grad = 2.0 * diff / b;
    return r;
}

LossResult softmax_ce_loss(const MatrixXd& logits, const std::vector<int>& labels) {
    const Eigen::Index b = logits.rows();
    const Eigen::Index k = logits.cols();
    if (static_cast<Eigen::Index>(labels.size()) != b)
        throw std::invalid_argument("softmax_ce_loss: label count mismatch");
    LossResult r;
    r.grad.resize(b, k);
    for (Eigen::Index i = 0; i < b; ++i) {
        if (labels[i] < 0 || labels[i] >= k)
            throw std::out_of_range("softmax_ce_loss: label out of range");
        const double mx = logits.row(i).maxCoeff();
        Eigen::RowVectorXd e = (logits.row(i).array() - mx).exp();
        const double z = e.sum();
        r.loss += -(logits(i, labels[i]) - mx - std::log(z));
        r.grad.row(i) = e / z;
        r.grad(i, labels[i]) -= 1.0;
    }
    r.loss /= static_cast<double>(b);
    r.grad /= static_cast<double>(b);
    return r;
}

KlResult gaussian_kl(const MatrixXd& mu, const MatrixXd& logvar) {
    if (mu.rows() != logvar.rows() || mu.cols() != logvar.cols())
        throw std::invalid_argument("gaussian_kl: shape mismatch");
    if (!mu.allFinite() || !logvar.allFinite())
        throw std::invalid_argument("gaussian_kl: non-finite input");
    const double b = static_cast<double>(mu.rows());
    KlResult r;
    MatrixXd ev = logvar.array().exp();
    r.loss = 0.5 * (mu.array().square() + ev.array() - 1.0 - logvar.array()).sum() / b;
    r.d_mu = mu / b;
    r.d_logvar = 0.5 * (ev - MatrixXd::Ones(mu.rows(), mu.cols())) / b;
    return r;
}

AdamState make_adam_state(const std::vector<ParamRef>& params) {
    AdamState st;
    for (const auto& p : params) {
        st.m.push_back(VectorXd::Zero(p.size));
        st.v.push_back(VectorXd::Zero(p.size));
    }
    return st;
}

void adam_step(std::vector<ParamRef>& params, const GradientSet& grads,
               AdamState& state, const AdamConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: size mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (grads[i].size() != params[i].size)
            throw std::invalid_argument("adam_step: gradient shape mismatch");
        Eigen::Map<VectorXd> p(params[i].data, params[i].size);
        auto& m = state.m[i];
        auto& v = state.v[i];
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grads[i];
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * grads[i].cwiseProduct(grads[i]);
        p.array() -= cfg.lr * (m.array() / bc1) /
                     ((v.array() / bc2).sqrt() + cfg.eps);
    }
}

double finite_diff_check(std::vector<ParamRef>& params,
                         const std::function<double()>& loss_fn,
                         const GradientSet& analytic, double epsilon) {
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        for (Eigen::Index j = 0; j < params[i].size; ++j) {
            double& x = params[i].data[j];
            const double saved = x;
            x = saved + epsilon;
            const double lp = loss_fn();
            x = saved - epsilon;
            const double lm = loss_fn();
            x = saved;
            const double numeric = (lp - lm) / (2.0 * epsilon);
            const double g = analytic[i](j);
            const double rel = std::abs(numeric - g) /
                               std::max({std::abs(numeric), std::abs(g), 1.0});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

}  // namespace taei::nn
