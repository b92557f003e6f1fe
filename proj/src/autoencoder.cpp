#include "taei/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "taei/rng.hpp"

namespace taei::ae {

using nn::Activation;
using nlohmann::json;

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::AE: return "ae";
        case Variant::VAE: return "vae";
        case Variant::RAE: return "rae";
    }
    return "?";
}

int embedding_dim(int vocab) {
    return std::min(8, (vocab + 1) / 2);
}

int AutoencoderModel::input_width() const {
    int w = schema.n_continuous();
    for (const auto& e : embeddings) w += static_cast<int>(e.cols());
    return w;
}

namespace {

void add_ref(std::vector<nn::ParamRef>& out, MatrixXd& m) {
    out.push_back({m.data(), m.size()});
}
void add_ref(std::vector<nn::ParamRef>& out, Eigen::VectorXd& v) {
    out.push_back({v.data(), v.size()});
}
void add_mlp_refs(std::vector<nn::ParamRef>& out, Mlp& mlp) {
    for (auto& layer : mlp.layers) {
        add_ref(out, layer.weights);
        add_ref(out, layer.bias);
    }
}

}  // namespace

std::vector<nn::ParamRef> AutoencoderModel::params() {
    std::vector<nn::ParamRef> out;
    for (auto& e : embeddings) add_ref(out, e);
    add_mlp_refs(out, encoder);
    add_mlp_refs(out, decoder);
    add_ref(out, cont_head.weights);
    add_ref(out, cont_head.bias);
    for (auto& h : cat_heads) {
        add_ref(out, h.weights);
        add_ref(out, h.bias);
    }
    return out;
}

AutoencoderModel build_model(const tab::TabularSchema& schema, Variant variant,
                             int latent_dim, const std::vector<int>& hidden_widths,
                             std::uint64_t seed) {
    if (schema.columns.empty()) throw std::invalid_argument("build_model: empty schema");
    AutoencoderModel m;
    m.variant = variant;
    m.schema = schema;
    Rng rng(seed);

    int in_width = schema.n_continuous();
    for (int ci : schema.categorical_indices()) {
        const int vocab = static_cast<int>(schema.columns[ci].categories.size());
        const int d = embedding_dim(vocab);
        MatrixXd emb(vocab + 1, d);  // +1: reserved unseen code
        for (Eigen::Index j = 0; j < emb.cols(); ++j)
            for (Eigen::Index i = 0; i < emb.rows(); ++i)
                emb(i, j) = (2.0 * rng.uniform() - 1.0) * 0.05;
        m.embeddings.push_back(std::move(emb));
        in_width += d;
    }

    if (latent_dim <= 0) latent_dim = std::min(16, std::max(2, (in_width + 1) / 2));
    m.latent_dim = latent_dim;
    const int enc_out = variant == Variant::VAE ? 2 * latent_dim : latent_dim;

    int w = in_width;
    for (int h : hidden_widths) {
        m.encoder.layers.push_back(nn::make_dense(w, h, Activation::ReLU, rng));
        w = h;
    }
    m.encoder.layers.push_back(nn::make_dense(w, enc_out, Activation::Identity, rng));

    w = latent_dim;
    for (auto it = hidden_widths.rbegin(); it != hidden_widths.rend(); ++it) {
        m.decoder.layers.push_back(nn::make_dense(w, *it, Activation::ReLU, rng));
        w = *it;
    }
    m.cont_head = nn::make_dense(w, schema.n_continuous(), Activation::Identity, rng);
    for (int ci : schema.categorical_indices()) {
        const int vocab = static_cast<int>(schema.columns[ci].categories.size());
        m.cat_heads.push_back(nn::make_dense(w, vocab, Activation::Identity, rng));
    }
    return m;
}

namespace {

// Concatenate standardized continuous columns with embedding lookups.
MatrixXd embed_input(const AutoencoderModel& m, const Batch& batch) {
    const Eigen::Index b = batch.cont.rows() > 0 ? batch.cont.rows() : batch.cat.rows();
    MatrixXd x(b, m.schema.n_continuous() + [&] {
        int w = 0;
        for (const auto& e : m.embeddings) w += static_cast<int>(e.cols());
        return w;
    }());
    x.leftCols(m.schema.n_continuous()) = batch.cont;
    int off = m.schema.n_continuous();
    for (std::size_t j = 0; j < m.embeddings.size(); ++j) {
        const auto& emb = m.embeddings[j];
        for (Eigen::Index i = 0; i < b; ++i) {
            const int code = batch.cat(i, static_cast<Eigen::Index>(j));
            if (code < 0 || code >= emb.rows())
                throw std::out_of_range("embed_input: categorical code out of range");
            x.block(i, off, 1, emb.cols()) = emb.row(code);
        }
        off += static_cast<int>(emb.cols());
    }
    return x;
}

std::vector<int> column_codes(const Eigen::MatrixXi& cat, Eigen::Index col) {
    std::vector<int> out(cat.rows());
    for (Eigen::Index i = 0; i < cat.rows(); ++i) out[i] = cat(i, col);
    return out;
}

}  // namespace

LossGrads reconstruction_loss(AutoencoderModel& model, const Batch& batch,
                              const MatrixXd* vae_noise) {
    const Eigen::Index b = batch.cont.rows() > 0 ? batch.cont.rows() : batch.cat.rows();
    if (b == 0) throw std::invalid_argument("reconstruction_loss: empty batch");
    const int latent = model.latent_dim;

    MatrixXd x = embed_input(model, batch);
    nn::MlpCache enc_cache;
    MatrixXd enc_out = nn::mlp_forward(model.encoder, x, &enc_cache);

    MatrixXd mu, logvar, sigma, noise, z;
    if (model.variant == Variant::VAE) {
        mu = enc_out.leftCols(latent);
        logvar = enc_out.rightCols(latent);
        sigma = (0.5 * logvar.array()).exp();
        noise = vae_noise ? *vae_noise : MatrixXd::Zero(b, latent);
        z = mu + sigma.cwiseProduct(noise);
    } else {
        z = enc_out;
    }

    nn::MlpCache dec_cache;
    MatrixXd h = nn::mlp_forward(model.decoder, z, &dec_cache);

    LossGrads out;
    MatrixXd d_h = MatrixXd::Zero(h.rows(), h.cols());

    nn::GradientSet head_w_grads;  // cont head + cat heads, in params() order
    MatrixXd d_cont_w = MatrixXd::Zero(model.cont_head.weights.rows(),
                                       model.cont_head.weights.cols());
    Eigen::VectorXd d_cont_b = Eigen::VectorXd::Zero(model.cont_head.bias.size());
    if (model.schema.n_continuous() > 0) {
        MatrixXd pred = nn::dense_forward(model.cont_head, h);
        auto mse = nn::mse_loss(pred, batch.cont);
        out.recon += mse.loss;
        d_cont_w = h.transpose() * mse.grad;
        d_cont_b = mse.grad.colwise().sum();
        d_h += mse.grad * model.cont_head.weights.transpose();
    }
    std::vector<MatrixXd> d_cat_w;
    std::vector<Eigen::VectorXd> d_cat_b;
    for (std::size_t j = 0; j < model.cat_heads.size(); ++j) {
        MatrixXd logits = nn::dense_forward(model.cat_heads[j], h);
        auto ce = nn::softmax_ce_loss(logits, column_codes(batch.cat, j));
        out.recon += model.loss_alpha * ce.loss;
        MatrixXd g = model.loss_alpha * ce.grad;
        d_cat_w.push_back(h.transpose() * g);
        d_cat_b.push_back(g.colwise().sum());
        d_h += g * model.cat_heads[j].weights.transpose();
    }
    out.total = out.recon;

    nn::MlpGrads dec_grads = nn::mlp_backward(model.decoder, dec_cache, d_h);
    MatrixXd d_z = dec_grads.d_input;

    if (model.variant == Variant::RAE) {
        out.total += model.rae_lambda * z.squaredNorm() / static_cast<double>(b);
        double wnorm = model.cont_head.weights.squaredNorm();
        for (const auto& layer : model.decoder.layers) wnorm += layer.weights.squaredNorm();
        for (const auto& head : model.cat_heads) wnorm += head.weights.squaredNorm();
        out.total += model.rae_lambda * wnorm;
        d_z += (2.0 * model.rae_lambda / static_cast<double>(b)) * z;
    }

    MatrixXd d_enc_out;
    if (model.variant == Variant::VAE) {
        auto kl = nn::gaussian_kl(mu, logvar);
        out.total += kl.loss;
        MatrixXd d_mu = d_z + kl.d_mu;
        MatrixXd d_logvar =
            0.5 * d_z.cwiseProduct(noise).cwiseProduct(sigma) + kl.d_logvar;
        d_enc_out.resize(b, 2 * latent);
        d_enc_out.leftCols(latent) = d_mu;
        d_enc_out.rightCols(latent) = d_logvar;
    } else {
        d_enc_out = d_z;
    }

    nn::MlpGrads enc_grads = nn::mlp_backward(model.encoder, enc_cache, d_enc_out);

    // embedding gradients: scatter-add the input gradient slices
    std::vector<MatrixXd> d_emb;
    int off = model.schema.n_continuous();
    for (std::size_t j = 0; j < model.embeddings.size(); ++j) {
        const auto& emb = model.embeddings[j];
        MatrixXd g = MatrixXd::Zero(emb.rows(), emb.cols());
        for (Eigen::Index i = 0; i < b; ++i)
            g.row(batch.cat(i, static_cast<Eigen::Index>(j))) +=
                enc_grads.d_input.block(i, off, 1, emb.cols());
        d_emb.push_back(std::move(g));
        off += static_cast<int>(emb.cols());
    }

    if (!std::isfinite(out.total))
        throw std::runtime_error("reconstruction_loss: non-finite loss");

    // flatten in params() order
    for (const auto& g : d_emb) out.grads.push_back(nn::flatten(g));
    for (std::size_t li = 0; li < model.encoder.layers.size(); ++li) {
        out.grads.push_back(nn::flatten(enc_grads.d_weights[li]));
        out.grads.push_back(enc_grads.d_bias[li]);
    }
    for (std::size_t li = 0; li < model.decoder.layers.size(); ++li) {
        MatrixXd dw = dec_grads.d_weights[li];
        if (model.variant == Variant::RAE)
            dw += 2.0 * model.rae_lambda * model.decoder.layers[li].weights;
        out.grads.push_back(nn::flatten(dw));
        out.grads.push_back(dec_grads.d_bias[li]);
    }
    {
        MatrixXd dw = d_cont_w;
        if (model.variant == Variant::RAE)
            dw += 2.0 * model.rae_lambda * model.cont_head.weights;
        out.grads.push_back(nn::flatten(dw));
        out.grads.push_back(d_cont_b);
    }
    for (std::size_t j = 0; j < model.cat_heads.size(); ++j) {
        MatrixXd dw = d_cat_w[j];
        if (model.variant == Variant::RAE)
            dw += 2.0 * model.rae_lambda * model.cat_heads[j].weights;
        out.grads.push_back(nn::flatten(dw));
        out.grads.push_back(d_cat_b[j]);
    }
    out.latents = std::move(z);
    return out;
}

double eval_recon_loss(AutoencoderModel& model, const Batch& batch) {
    MatrixXd z = encode(model, batch);
    MatrixXd h = nn::mlp_forward(model.decoder, z);
    double loss = 0.0;
    if (model.schema.n_continuous() > 0)
        loss += nn::mse_loss(nn::dense_forward(model.cont_head, h), batch.cont).loss;
    for (std::size_t j = 0; j < model.cat_heads.size(); ++j)
        loss += model.loss_alpha *
                nn::softmax_ce_loss(nn::dense_forward(model.cat_heads[j], h),
                                    column_codes(batch.cat, j))
                    .loss;
    return loss;
}

namespace {

Batch slice_batch(const Batch& full, const std::vector<int>& rows, int lo, int hi) {
    Batch b;
    b.cont.resize(hi - lo, full.cont.cols());
    b.cat.resize(hi - lo, full.cat.cols());
    for (int i = lo; i < hi; ++i) {
        b.cont.row(i - lo) = full.cont.row(rows[i]);
        if (full.cat.cols() > 0) b.cat.row(i - lo) = full.cat.row(rows[i]);
    }
    return b;
}

std::vector<Eigen::VectorXd> snapshot_params(AutoencoderModel& m) {
    std::vector<Eigen::VectorXd> out;
    for (auto& p : m.params())
        out.emplace_back(Eigen::Map<const Eigen::VectorXd>(p.data, p.size));
    return out;
}

void restore_params(AutoencoderModel& m, const std::vector<Eigen::VectorXd>& snap) {
    auto refs = m.params();
    for (std::size_t i = 0; i < refs.size(); ++i)
        Eigen::Map<Eigen::VectorXd>(refs[i].data, refs[i].size) = snap[i];
}

}  // namespace

TrainHistory train(AutoencoderModel& model, const Batch& train_set,
                   const Batch& val_set, const TrainConfig& config) {
    const int n = static_cast<int>(std::max(train_set.cont.rows(), train_set.cat.rows()));
    if (n == 0 || std::max(val_set.cont.rows(), val_set.cat.rows()) == 0)
        throw std::invalid_argument("train: empty fold");

    auto refs = model.params();
    nn::AdamState adam = nn::make_adam_state(refs);
    nn::AdamConfig adam_cfg;
    adam_cfg.lr = config.lr;
    Rng rng(config.seed);

    TrainHistory hist;
    std::vector<Eigen::VectorXd> best = snapshot_params(model);
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        int batches = 0;
        for (int lo = 0; lo < n; lo += config.batch_size) {
            const int hi = std::min(n, lo + config.batch_size);
            Batch batch = slice_batch(train_set, order, lo, hi);
            MatrixXd noise;
            const MatrixXd* noise_ptr = nullptr;
            if (model.variant == Variant::VAE) {
                noise.resize(hi - lo, model.latent_dim);
                for (Eigen::Index c = 0; c < noise.cols(); ++c)
                    for (Eigen::Index r = 0; r < noise.rows(); ++r)
                        noise(r, c) = rng.normal();
                noise_ptr = &noise;
            }
            LossGrads lg;
            try {
                lg = reconstruction_loss(model, batch, noise_ptr);
            } catch (const std::runtime_error&) {
                throw std::runtime_error("train: diverged at epoch " +
                                         std::to_string(epoch));
            }
            nn::adam_step(refs, lg.grads, adam, adam_cfg);
            epoch_loss += lg.total;
            ++batches;
        }
        hist.train_loss.push_back(epoch_loss / batches);
        const double val = eval_recon_loss(model, val_set);
        if (!std::isfinite(val))
            throw std::runtime_error("train: diverged at epoch " + std::to_string(epoch));
        hist.val_loss.push_back(val);
        if (val < best_val) {
            best_val = val;
            best = snapshot_params(model);
            hist.best_epoch = epoch;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (since_best >= config.patience) break;
    }
    restore_params(model, best);
    hist.best_val = best_val;
    return hist;
}

MatrixXd encode(const AutoencoderModel& model, const Batch& rows) {
    MatrixXd x = embed_input(model, rows);
    MatrixXd enc_out = nn::mlp_forward(model.encoder, x);
    if (model.variant == Variant::VAE) return enc_out.leftCols(model.latent_dim);
    return enc_out;
}

Batch decode(const AutoencoderModel& model, const MatrixXd& latents) {
    if (latents.cols() != model.latent_dim)
        throw std::invalid_argument("decode: latent width mismatch");
    MatrixXd h = nn::mlp_forward(model.decoder, latents);
    Batch out;
    out.cont = model.schema.n_continuous() > 0
                   ? nn::dense_forward(model.cont_head, h)
                   : MatrixXd(latents.rows(), 0);
    out.cat.resize(latents.rows(), static_cast<Eigen::Index>(model.cat_heads.size()));
    for (std::size_t j = 0; j < model.cat_heads.size(); ++j) {
        MatrixXd logits = nn::dense_forward(model.cat_heads[j], h);
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
            int arg = 0;
            for (Eigen::Index c = 1; c < logits.cols(); ++c)
                if (logits(i, c) > logits(i, arg)) arg = static_cast<int>(c);
            out.cat(i, static_cast<Eigen::Index>(j)) = arg;
        }
    }
    return out;
}

Batch to_batch(const tab::MixedDataset& data) {
    return {data.continuous, data.categorical};
}

namespace {

json matrix_to_json(const MatrixXd& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> vals(m.data(), m.data() + m.size());
    j["data"] = vals;
    return j;
}

MatrixXd matrix_from_json(const json& j) {
    MatrixXd m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
    auto vals = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(vals.size()) != m.size())
        throw std::runtime_error("checkpoint: matrix size mismatch");
    std::copy(vals.begin(), vals.end(), m.data());
    return m;
}

json layer_to_json(const DenseLayer& l) {
    json j;
    j["weights"] = matrix_to_json(l.weights);
    std::vector<double> b(l.bias.data(), l.bias.data() + l.bias.size());
    j["bias"] = b;
    j["activation"] = l.activation == Activation::ReLU ? "relu" : "identity";
    return j;
}

DenseLayer layer_from_json(const json& j) {
    DenseLayer l;
    l.weights = matrix_from_json(j.at("weights"));
    auto b = j.at("bias").get<std::vector<double>>();
    l.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
    l.activation =
        j.at("activation").get<std::string>() == "relu" ? Activation::ReLU
                                                        : Activation::Identity;
    return l;
}

}  // namespace

void save_checkpoint(const AutoencoderModel& model, const std::string& path) {
    json j;
    j["format_version"] = 1;
    j["schema_hash"] = model.schema.hash();
    j["schema"] = json::parse(model.schema.to_json());
    j["variant"] = variant_name(model.variant);
    j["latent_dim"] = model.latent_dim;
    j["loss_alpha"] = model.loss_alpha;
    j["rae_lambda"] = model.rae_lambda;
    j["embeddings"] = json::array();
    for (const auto& e : model.embeddings) j["embeddings"].push_back(matrix_to_json(e));
    j["encoder"] = json::array();
    for (const auto& l : model.encoder.layers) j["encoder"].push_back(layer_to_json(l));
    j["decoder"] = json::array();
    for (const auto& l : model.decoder.layers) j["decoder"].push_back(layer_to_json(l));
    j["cont_head"] = layer_to_json(model.cont_head);
    j["cat_heads"] = json::array();
    for (const auto& h : model.cat_heads) j["cat_heads"].push_back(layer_to_json(h));
    if (model.preprocess) {
        j["preprocess"] = {{"mean", model.preprocess->mean},
                           {"scale", model.preprocess->scale}};
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    out << j.dump() << "\n";
}

AutoencoderModel load_checkpoint(const std::string& path,
                                 const tab::TabularSchema& expected_schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    json j = json::parse(in);
    if (j.at("schema_hash").get<std::uint64_t>() != expected_schema.hash())
        throw std::runtime_error("checkpoint schema hash mismatch");
    AutoencoderModel m;
    m.schema = expected_schema;
    const std::string v = j.at("variant").get<std::string>();
    m.variant = v == "vae" ? Variant::VAE : (v == "rae" ? Variant::RAE : Variant::AE);
    m.latent_dim = j.at("latent_dim").get<int>();
    m.loss_alpha = j.at("loss_alpha").get<double>();
    m.rae_lambda = j.at("rae_lambda").get<double>();
    for (const auto& e : j.at("embeddings")) m.embeddings.push_back(matrix_from_json(e));
    for (const auto& l : j.at("encoder")) m.encoder.layers.push_back(layer_from_json(l));
    for (const auto& l : j.at("decoder")) m.decoder.layers.push_back(layer_from_json(l));
    m.cont_head = layer_from_json(j.at("cont_head"));
    for (const auto& h : j.at("cat_heads")) m.cat_heads.push_back(layer_from_json(h));
    if (j.contains("preprocess")) {
        tab::PreprocessState st;
        st.mean = j["preprocess"].at("mean").get<std::vector<double>>();
        st.scale = j["preprocess"].at("scale").get<std::vector<double>>();
        m.preprocess = st;
    }
    return m;
}

}  // namespace taei::ae
