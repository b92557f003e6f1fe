#pragma once
#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "taei/nn.hpp"
#include "taei/tabular.hpp"

namespace taei::ae {

using Eigen::MatrixXd;
using Eigen::MatrixXi;
using nn::Mlp;
using nn::DenseLayer;

enum class Variant { AE, VAE, RAE };

std::string variant_name(Variant v);

// Multi-modal autoencoder over standardized continuous columns and embedded
// categorical codes. Embedding tables carry one extra row for the reserved
// unseen code; decoder softmax heads cover the vocabulary only, so decoded
// codes are always valid.
struct AutoencoderModel {
    Variant variant = Variant::AE;
    tab::TabularSchema schema;
    std::vector<MatrixXd> embeddings;   // (vocab+1) x d per categorical column
    Mlp encoder;                        // -> latent (AE/RAE) or 2*latent (VAE)
    Mlp decoder;                        // latent -> last hidden
    DenseLayer cont_head;               // hidden -> |C|, identity
    std::vector<DenseLayer> cat_heads;  // hidden -> vocab_j, identity (logits)
    int latent_dim = 2;
    double loss_alpha = 0.3;
    double rae_lambda = 1e-4;
    std::optional<tab::PreprocessState> preprocess;  // set by the pipeline

    int input_width() const;
    std::vector<nn::ParamRef> params();
};

// d_j = min(8, ceil(vocab_j / 2))
int embedding_dim(int vocab);

// latent_dim <= 0 picks the default max(2, ceil(input_width/2)) capped at 16.
AutoencoderModel build_model(const tab::TabularSchema& schema, Variant variant,
                             int latent_dim, const std::vector<int>& hidden_widths,
                             std::uint64_t seed);

struct Batch {
    MatrixXd cont;  // standardized
    MatrixXi cat;
};

struct LossGrads {
    double total = 0.0;
    double recon = 0.0;  // MSE + alpha * CE, the early-stopping quantity
    nn::GradientSet grads;
    MatrixXd latents;
};

// Full objective with exact reverse-mode gradients for every parameter,
// embeddings included. For VAE, `vae_noise` (B x latent) fixes the
// reparameterization draw; pass zeros for a deterministic evaluation.
LossGrads reconstruction_loss(AutoencoderModel& model, const Batch& batch,
                              const MatrixXd* vae_noise = nullptr);

double eval_recon_loss(AutoencoderModel& model, const Batch& batch);

struct TrainConfig {
    int max_epochs = 500;
    int batch_size = 128;
    int patience = 10;
    double lr = 1e-3;
    std::uint64_t seed = 0;
};

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    int best_epoch = -1;
    double best_val = 0.0;
};

TrainHistory train(AutoencoderModel& model, const Batch& train_set,
                   const Batch& val_set, const TrainConfig& config);

// AE/RAE: encoder output; VAE: posterior mean (deterministic).
MatrixXd encode(const AutoencoderModel& model, const Batch& rows);

// Continuous head output plus per-column argmax codes (ties -> lowest code).
Batch decode(const AutoencoderModel& model, const MatrixXd& latents);

Batch to_batch(const tab::MixedDataset& data);

void save_checkpoint(const AutoencoderModel& model, const std::string& path);
AutoencoderModel load_checkpoint(const std::string& path,
                                 const tab::TabularSchema& expected_schema);

}  // namespace taei::ae
