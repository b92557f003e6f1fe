#pragma once
#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "taei/rng.hpp"

namespace taei::nn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Activation { ReLU, Identity };

struct DenseLayer {
    MatrixXd weights;  // fan_in x fan_out
    VectorXd bias;     // fan_out
    Activation activation = Activation::Identity;
};

DenseLayer make_dense(int fan_in, int fan_out, Activation act, Rng& rng);

// y = act(x * W + b), row-major batches
MatrixXd dense_forward(const DenseLayer& layer, const MatrixXd& x);

// A plain stack of dense layers. An empty stack is the identity.
struct Mlp {
    std::vector<DenseLayer> layers;
};

struct MlpCache {
    MatrixXd input;
    std::vector<MatrixXd> pre;   // pre-activation per layer
    std::vector<MatrixXd> post;  // post-activation per layer
};

MatrixXd mlp_forward(const Mlp& mlp, const MatrixXd& x, MlpCache* cache = nullptr);

struct MlpGrads {
    std::vector<MatrixXd> d_weights;
    std::vector<VectorXd> d_bias;
    MatrixXd d_input;
};

// Reverse-mode pass given dLoss/dOutput.
MlpGrads mlp_backward(const Mlp& mlp, const MlpCache& cache, const MatrixXd& d_out);

struct LossResult {
    double loss = 0.0;
    MatrixXd grad;  // dLoss/dPred
};

// Sum of squared differences per row, averaged over the batch.
LossResult mse_loss(const MatrixXd& pred, const MatrixXd& target);

// Mean negative log-softmax of the true class; grad = (softmax - onehot)/B.
LossResult softmax_ce_loss(const MatrixXd& logits, const std::vector<int>& labels);

struct KlResult {
    double loss = 0.0;
    MatrixXd d_mu;
    MatrixXd d_logvar;
};

// 0.5 * sum(mu^2 + exp(logvar) - 1 - logvar) per row, batch-averaged.
KlResult gaussian_kl(const MatrixXd& mu, const MatrixXd& logvar);

// Flat view over a model's parameters; order must be stable.
struct ParamRef {
    double* data = nullptr;
    Eigen::Index size = 0;
};

using GradientSet = std::vector<VectorXd>;  // parallel to a ParamRef list

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<VectorXd> m;
    std::vector<VectorXd> v;
    long step = 0;
};

AdamState make_adam_state(const std::vector<ParamRef>& params);

void adam_step(std::vector<ParamRef>& params, const GradientSet& grads,
               AdamState& state, const AdamConfig& cfg);

// Central-difference check of `analytic` against `loss_fn` evaluated after
// perturbing each parameter element. Returns the worst relative error.
double finite_diff_check(std::vector<ParamRef>& params,
                         const std::function<double()>& loss_fn,
                         const GradientSet& analytic, double epsilon);

inline VectorXd flatten(const MatrixXd& m) {
    return Eigen::Map<const VectorXd>(m.data(), m.size());
}

}  // namespace taei::nn
