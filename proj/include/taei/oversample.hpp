#pragma once
#include <optional>
#include <string>
#include <vector>

#include "taei/autoencoder.hpp"
#include "taei/interpolate.hpp"
#include "taei/tabular.hpp"

namespace taei::os {

enum class Method {
    NoOS,
    ROS,
    SMOTE,
    SMOTE_NC,
    Poly,
    SMOTE_AE,
    SMOTE_VAE,
    SMOTE_RAE,
    Poly_AE,
    Poly_VAE,
    Poly_RAE,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);
bool is_latent(Method m);
std::vector<Method> all_methods();

struct OversamplerSpec {
    Method method = Method::NoOS;
    std::optional<double> ratio;  // fraction of the majority-minority gap to close
    std::optional<int> n_syn;     // absolute count; exactly one of ratio/n_syn
    int k = 5;
    int latent_dim = 0;  // 0 -> model default
    std::vector<int> hidden_widths = {64, 32};
    ae::TrainConfig train;
    std::uint64_t seed = 0;
};

// round(ratio * (n_maj - n_min)), floored at 0
int resolve_n_syn(double ratio, int n_min, int n_maj);

struct AugmentedDataset {
    tab::MixedDataset original;
    interp::SyntheticBatch synthetic;  // original feature space, minority label
    // stored pre-decode latents for latent methods (synthetics then the
    // encoded minority rows), empty otherwise
    Eigen::MatrixXd synthetic_latents;
    Eigen::MatrixXd minority_latents;

    tab::MixedDataset combined() const;
    int n_syn() const { return static_cast<int>(synthetic.size()); }
};

// Fit preprocessing on train, run the requested oversampler, map synthetics
// back to the original feature space. `val` is used only for autoencoder
// early stopping.
AugmentedDataset oversample(const tab::MixedDataset& train,
                            const tab::MixedDataset& val,
                            const OversamplerSpec& spec);

}  // namespace taei::os
