#include "taei/oversample.hpp"

#include <cmath>
#include <stdexcept>

#include "taei/rng.hpp"

namespace taei::os {

std::string method_name(Method m) {
    switch (m) {
        case Method::NoOS: return "no_os";
        case Method::ROS: return "ros";
        case Method::SMOTE: return "smote";
        case Method::SMOTE_NC: return "smote_nc";
        case Method::Poly: return "poly";
        case Method::SMOTE_AE: return "smote_ae";
        case Method::SMOTE_VAE: return "smote_vae";
        case Method::SMOTE_RAE: return "smote_rae";
        case Method::Poly_AE: return "poly_ae";
        case Method::Poly_VAE: return "poly_vae";
        case Method::Poly_RAE: return "poly_rae";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    for (Method m : all_methods())
        if (method_name(m) == name) return m;
    throw std::invalid_argument("unknown oversampler method: " + name);
}

bool is_latent(Method m) {
    switch (m) {
        case Method::SMOTE_AE:
        case Method::SMOTE_VAE:
        case Method::SMOTE_RAE:
        case Method::Poly_AE:
        case Method::Poly_VAE:
        case Method::Poly_RAE:
            return true;
        default:
            return false;
    }
}

std::vector<Method> all_methods() {
    return {Method::NoOS,      Method::ROS,      Method::SMOTE,
            Method::SMOTE_NC,  Method::Poly,     Method::SMOTE_AE,
            Method::SMOTE_VAE, Method::SMOTE_RAE, Method::Poly_AE,
            Method::Poly_VAE,  Method::Poly_RAE};
}

int resolve_n_syn(double ratio, int n_min, int n_maj) {
    if (ratio <= 0.0 || ratio > 1.0)
        throw std::invalid_argument("resolve_n_syn: ratio must be in (0, 1]");
    const int gap = n_maj - n_min;
    if (gap <= 0) return 0;
    return static_cast<int>(std::lround(ratio * gap));
}

tab::MixedDataset AugmentedDataset::combined() const {
    tab::MixedDataset out = original;
    const Eigen::Index n0 = original.size();
    const Eigen::Index ns = synthetic.size();
    out.continuous.conservativeResize(n0 + ns, Eigen::NoChange);
    out.categorical.conservativeResize(n0 + ns, Eigen::NoChange);
    out.labels.conservativeResize(n0 + ns);
    for (Eigen::Index i = 0; i < ns; ++i) {
        out.continuous.row(n0 + i) = synthetic.continuous.row(i);
        if (out.categorical.cols() > 0)
            out.categorical.row(n0 + i) = synthetic.categorical.row(i);
        out.labels(n0 + i) = 1;
    }
    return out;
}

namespace {

ae::Variant variant_of(Method m) {
    switch (m) {
        case Method::SMOTE_VAE:
        case Method::Poly_VAE:
            return ae::Variant::VAE;
        case Method::SMOTE_RAE:
        case Method::Poly_RAE:
            return ae::Variant::RAE;
        default:
            return ae::Variant::AE;
    }
}

bool uses_poly(Method m) {
    return m == Method::Poly || m == Method::Poly_AE || m == Method::Poly_VAE ||
           m == Method::Poly_RAE;
}

// codes interpolated as reals -> nearest valid code, clamped
Eigen::MatrixXi round_codes(const Eigen::MatrixXd& vals,
                            const tab::TabularSchema& schema) {
    Eigen::MatrixXi out(vals.rows(), vals.cols());
    const auto cat_idx = schema.categorical_indices();
    for (Eigen::Index j = 0; j < vals.cols(); ++j) {
        const int vocab =
            static_cast<int>(schema.columns[cat_idx[j]].categories.size());
        for (Eigen::Index i = 0; i < vals.rows(); ++i) {
            int code = static_cast<int>(std::lround(vals(i, j)));
            out(i, j) = std::clamp(code, 0, vocab - 1);
        }
    }
    return out;
}

}  // namespace

AugmentedDataset oversample(const tab::MixedDataset& train,
                            const tab::MixedDataset& val,
                            const OversamplerSpec& spec) {
    if (spec.ratio.has_value() == spec.n_syn.has_value() &&
        spec.method != Method::NoOS)
        throw std::invalid_argument("oversample: set exactly one of ratio/n_syn");

    AugmentedDataset out;
    out.original = train;
    const int n_min = train.minority_count();
    const int n_maj = static_cast<int>(train.size()) - n_min;
    const int n_syn = spec.method == Method::NoOS ? 0
                      : (spec.n_syn ? *spec.n_syn
                                    : resolve_n_syn(*spec.ratio, n_min, n_maj));

    if (spec.method == Method::NoOS || n_syn == 0) {
        out.synthetic.continuous.resize(0, train.continuous.cols());
        out.synthetic.categorical.resize(0, train.categorical.cols());
        return out;
    }
    if (n_min < 2 && spec.method != Method::ROS)
        throw std::invalid_argument("oversample: need at least 2 minority rows");

    const tab::MixedDataset minority_raw = train.minority_rows();
    const std::uint64_t interp_seed = mix_seed(spec.seed, 0x496e74ULL);

    if (spec.method == Method::ROS) {
        out.synthetic = interp::ros(minority_raw.continuous, minority_raw.categorical,
                                    n_syn, interp_seed);
        return out;
    }

    auto [std_train, prep] = tab::fit_transform(train);
    const tab::MixedDataset minority = std_train.minority_rows();

    if (!is_latent(spec.method)) {
        interp::SyntheticBatch batch;
        if (spec.method == Method::SMOTE_NC) {
            batch = interp::smote_nc(minority.continuous, minority.categorical, n_syn,
                                     interp_seed, spec.k);
        } else {
            // ordinal trick: codes appended as continuous coordinates
            Eigen::MatrixXd pts(minority.size(),
                                minority.continuous.cols() + minority.categorical.cols());
            pts.leftCols(minority.continuous.cols()) = minority.continuous;
            pts.rightCols(minority.categorical.cols()) =
                minority.categorical.cast<double>();
            interp::SyntheticBatch raw =
                uses_poly(spec.method)
                    ? interp::poly_star(pts, n_syn, interp_seed)
                    : interp::smote(pts, n_syn, interp_seed, {spec.k, {}});
            batch.continuous = raw.continuous.leftCols(minority.continuous.cols());
            batch.categorical = round_codes(
                raw.continuous.rightCols(minority.categorical.cols()), train.schema);
            batch.provenance = std::move(raw.provenance);
        }
        tab::MixedDataset tmp;
        tmp.schema = train.schema;
        tmp.continuous = batch.continuous;
        tmp.categorical = batch.categorical;
        tmp.labels = Eigen::VectorXi::Ones(batch.size());
        batch.continuous = tab::inverse_transform(tmp, prep).continuous;
        out.synthetic = std::move(batch);
        return out;
    }

    // latent route: autoencoder on all training rows, interpolate encoded
    // minority, decode, de-standardize
    ae::AutoencoderModel model =
        ae::build_model(train.schema, variant_of(spec.method), spec.latent_dim,
                        spec.hidden_widths, mix_seed(spec.seed, 0x4d6f64ULL));
    model.preprocess = prep;
    ae::TrainConfig tc = spec.train;
    tc.seed = mix_seed(spec.seed, 0x54726eULL);
    const tab::MixedDataset std_val = tab::transform(val, prep);
    ae::train(model, ae::to_batch(std_train), ae::to_batch(std_val), tc);

    out.minority_latents = ae::encode(model, ae::to_batch(minority));
    interp::SyntheticBatch latent_batch =
        uses_poly(spec.method)
            ? interp::poly_star(out.minority_latents, n_syn, interp_seed)
            : interp::smote(out.minority_latents, n_syn, interp_seed, {spec.k, {}});
    out.synthetic_latents = latent_batch.continuous;

    ae::Batch decoded = ae::decode(model, out.synthetic_latents);
    tab::MixedDataset tmp;
    tmp.schema = train.schema;
    tmp.continuous = decoded.cont;
    tmp.categorical = decoded.cat;
    tmp.labels = Eigen::VectorXi::Ones(decoded.cont.rows());
    out.synthetic.continuous = tab::inverse_transform(tmp, prep).continuous;
    out.synthetic.categorical = decoded.cat;
    out.synthetic.provenance = std::move(latent_batch.provenance);
    return out;
}

}  // namespace taei::os
