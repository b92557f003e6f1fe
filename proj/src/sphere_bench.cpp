#include "taei/sphere_bench.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "taei/kdtree.hpp"

namespace taei::bench {

using nlohmann::json;

namespace {

// Marginal density of x0 on the unit D-sphere is proportional to
// (1 - x^2)^((D-3)/2) on [-1, 1].
double marginal_mass(double alpha, int dims) {
    const double p = (dims - 3) / 2.0;
    const int steps = 20000;
    // Simpson over [0, alpha]
    auto f = [&](double x) { return std::pow(std::max(0.0, 1.0 - x * x), p); };
    double h = alpha / steps;
    double s = f(0.0) + f(alpha);
    for (int i = 1; i < steps; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0;
}

}  // namespace

double slice_probability(double alpha, int dims) {
    if (alpha >= 1.0) return 1.0;
    if (alpha <= 0.0) return 0.0;
    return marginal_mass(alpha, dims) / marginal_mass(1.0, dims);
}

double solve_alpha(double mu, int dims, double tol) {
    if (mu <= 0.0 || mu > 1.0) throw std::invalid_argument("solve_alpha: mu out of range");
    if (mu == 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        const double p = slice_probability(mid, dims);
        if (std::abs(p - mu) <= tol * 0.1) return mid;
        (p < mu ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

MatrixXd random_rotation(int dims, Rng& rng) {
    MatrixXd g(dims, dims);
    for (int j = 0; j < dims; ++j)
        for (int i = 0; i < dims; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ();
    MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // sign-fix so the decomposition is unique (Haar-uniform over O(D))
    for (int j = 0; j < dims; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

SphereSpec make_sphere_spec(int dims, int n_samples, double minority_frac,
                            std::uint64_t seed) {
    if (dims < 3) throw std::invalid_argument("make_sphere_spec: dims must be >= 3");
    SphereSpec spec;
    spec.dims = dims;
    spec.n_samples = n_samples;
    spec.minority_frac = minority_frac;
    spec.slice_alpha = solve_alpha(minority_frac, dims);
    spec.seed = seed;
    Rng rng(mix_seed(seed, 0x526f74ULL));
    spec.rotation = random_rotation(dims, rng);
    return spec;
}

namespace {

Eigen::RowVectorXd draw_sphere_point(int dims, Rng& rng) {
    Eigen::RowVectorXd v(dims);
    double norm = 0.0;
    do {
        for (int i = 0; i < dims; ++i) v(i) = rng.normal();
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

tab::TabularSchema continuous_sphere_schema(int dims) {
    tab::TabularSchema s;
    for (int i = 0; i < dims; ++i)
        s.columns.push_back({"x" + std::to_string(i), tab::ColumnKind::Continuous, {}});
    s.target = "label";
    s.minority_label = "minority";
    return s;
}

}  // namespace

MatrixXd sample_region(const SphereSpec& spec, bool minority, int count, Rng& rng) {
    MatrixXd out(count, spec.dims);
    for (int i = 0; i < count; ++i) {
        Eigen::RowVectorXd v;
        do {
            v = draw_sphere_point(spec.dims, rng);
        } while ((std::abs(v(0)) <= spec.slice_alpha) != minority);
        out.row(i) = v * spec.rotation.transpose();
    }
    return out;
}

tab::MixedDataset sample_sphere_dataset(const SphereSpec& spec) {
    Rng rng(mix_seed(spec.seed, 0x536d70ULL));
    const int n_min = static_cast<int>(std::lround(spec.minority_frac * spec.n_samples));
    const int n_maj = spec.n_samples - n_min;
    tab::MixedDataset d;
    d.schema = continuous_sphere_schema(spec.dims);
    d.majority_label = "majority";
    d.continuous.resize(spec.n_samples, spec.dims);
    d.categorical.resize(spec.n_samples, 0);
    d.labels.resize(spec.n_samples);
    d.continuous.topRows(n_min) = sample_region(spec, true, n_min, rng);
    d.continuous.bottomRows(n_maj) = sample_region(spec, false, n_maj, rng);
    d.labels.head(n_min).setOnes();
    d.labels.tail(n_maj).setZero();
    return d;
}

DiscretizeResult discretize(const tab::MixedDataset& data,
                            const std::vector<int>& feature_indices, int bins,
                            std::uint64_t seed) {
    if (bins < 2) throw std::invalid_argument("discretize: need M >= 2");
    Rng rng(mix_seed(seed, 0x426e73ULL));
    DiscretizeResult out;
    std::vector<bool> selected(data.continuous.cols(), false);
    for (int f : feature_indices) {
        if (f < 0 || f >= data.continuous.cols())
            throw std::invalid_argument("discretize: bad feature index");
        selected[f] = true;
    }

    for (int f : feature_indices) {
        BinMap bm;
        bm.column = f;
        bm.bins = bins;
        bm.perm.resize(bins);
        for (int i = 0; i < bins; ++i) bm.perm[i] = i;
        rng.shuffle(bm.perm);
        bm.inverse.assign(bins, 0);
        for (int i = 0; i < bins; ++i) bm.inverse[bm.perm[i]] = i;
        out.bin_maps.push_back(std::move(bm));
    }

    tab::TabularSchema schema;
    for (Eigen::Index c = 0; c < data.continuous.cols(); ++c) {
        tab::Column col;
        col.name = data.schema.columns[c].name;
        if (selected[c]) {
            col.kind = tab::ColumnKind::Categorical;
            for (int b = 0; b < bins; ++b) col.categories.push_back("b" + std::to_string(b));
        }
        schema.columns.push_back(std::move(col));
    }
    schema.target = data.schema.target;
    schema.minority_label = data.schema.minority_label;

    const Eigen::Index n = data.size();
    tab::MixedDataset md;
    md.schema = schema;
    md.majority_label = data.majority_label;
    md.continuous.resize(n, data.continuous.cols() - feature_indices.size());
    md.categorical.resize(n, feature_indices.size());
    md.labels = data.labels;
    for (Eigen::Index i = 0; i < n; ++i) {
        int ci = 0, di = 0;
        for (Eigen::Index c = 0; c < data.continuous.cols(); ++c) {
            const double v = data.continuous(i, c);
            if (!selected[c]) {
                md.continuous(i, ci++) = v;
                continue;
            }
            if (v < -1.0 - 1e-9 || v > 1.0 + 1e-9)
                throw std::invalid_argument("discretize: value outside [-1, 1]");
            int bin = static_cast<int>(std::floor((v + 1.0) * bins / 2.0));
            bin = std::clamp(bin, 0, bins - 1);
            md.categorical(i, di) = out.bin_maps[di].perm[bin];
            ++di;
        }
    }
    out.data = std::move(md);
    return out;
}

MatrixXd to_geometric(const tab::MixedDataset& data,
                      const std::vector<BinMap>& bin_maps) {
    if (static_cast<Eigen::Index>(bin_maps.size()) != data.categorical.cols())
        throw std::invalid_argument("to_geometric: bin map count mismatch");
    const Eigen::Index n = data.size();
    const Eigen::Index total = data.continuous.cols() + data.categorical.cols();
    MatrixXd out(n, total);
    // reassemble in original column order: bin_maps carry the original index
    std::vector<int> cat_target;
    for (const auto& bm : bin_maps) cat_target.push_back(bm.column);
    std::vector<bool> is_cat(total, false);
    for (int c : cat_target) is_cat[c] = true;
    std::vector<int> cont_target;
    for (Eigen::Index c = 0; c < total; ++c)
        if (!is_cat[c]) cont_target.push_back(static_cast<int>(c));

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < data.continuous.cols(); ++c)
            out(i, cont_target[c]) = data.continuous(i, c);
        for (Eigen::Index d = 0; d < data.categorical.cols(); ++d) {
            const auto& bm = bin_maps[d];
            const int code = data.categorical(i, d);
            if (code < 0 || code >= bm.bins)
                throw std::out_of_range("to_geometric: invalid code");
            const int bin = bm.inverse[code];
            out(i, cat_target[d]) = -1.0 + (2.0 * bin + 1.0) / bm.bins;
        }
    }
    return out;
}

double cover(const MatrixXd& synthetic, const MatrixXd& reference) {
    if (synthetic.rows() == 0 || reference.rows() == 0)
        throw std::invalid_argument("cover: empty set");
    knn::KdTree tree(synthetic);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < reference.rows(); ++i)
        sum += tree.query(reference.row(i), 1)[0].dist;
    return sum / static_cast<double>(reference.rows());
}

double error_metric(const MatrixXd& synthetic, const MatrixXd& reference_minority,
                    const MatrixXd& reference_majority) {
    if (synthetic.rows() == 0 || reference_minority.rows() == 0 ||
        reference_majority.rows() == 0)
        throw std::invalid_argument("error_metric: empty set");
    // minority rows first: the (dist, index) tie rule then prefers minority
    MatrixXd all(reference_minority.rows() + reference_majority.rows(),
                 reference_minority.cols());
    all.topRows(reference_minority.rows()) = reference_minority;
    all.bottomRows(reference_majority.rows()) = reference_majority;
    knn::KdTree tree(all);
    int invalid = 0;
    for (Eigen::Index i = 0; i < synthetic.rows(); ++i) {
        const int nearest = tree.query(synthetic.row(i), 1)[0].index;
        if (nearest >= reference_minority.rows()) ++invalid;
    }
    return static_cast<double>(invalid) / static_cast<double>(synthetic.rows());
}

std::vector<int> pareto_front(const std::vector<std::pair<double, double>>& points) {
    if (points.empty()) throw std::invalid_argument("pareto_front: empty input");
    const int n = static_cast<int>(points.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (points[a].first != points[b].first) return points[a].first < points[b].first;
        return points[a].second < points[b].second;
    });
    std::vector<bool> keep(n, true);
    double best_second = std::numeric_limits<double>::infinity();
    for (int idx : order) {
        const auto& p = points[idx];
        // dominated iff an earlier point is <= in both and < in one
        if (p.second > best_second) {
            keep[idx] = false;
        } else if (p.second == best_second) {
            // equal second coordinate: dominated only if some kept point has
            // strictly smaller first coordinate
            bool dominated = false;
            for (int j : order) {
                if (j == idx) break;
                if (keep[j] && points[j].first < p.first &&
                    points[j].second <= p.second) {
                    dominated = true;
                    break;
                }
            }
            keep[idx] = !dominated;
        }
        best_second = std::min(best_second, p.second);
    }
    std::vector<int> front;
    for (int i = 0; i < n; ++i)
        if (keep[i]) front.push_back(i);
    return front;
}

std::vector<BenchmarkDataset> make_benchmark_suite(const SuiteConfig& cfg) {
    std::vector<BenchmarkDataset> out;
    for (int dims : cfg.dims) {
        for (int n : cfg.sizes) {
            for (const auto& modality : cfg.modalities) {
                const std::string klass = "d" + std::to_string(dims) + "_n" +
                                          std::to_string(n) + "_" + modality;
                for (int rep = 0; rep < cfg.repeats; ++rep) {
                    const std::uint64_t seed =
                        mix_seed(cfg.base_seed, mix_seed(hash_str(klass), rep));
                    BenchmarkDataset ds;
                    ds.klass = klass;
                    ds.repeat = rep;
                    ds.spec = make_sphere_spec(dims, n, cfg.mu, seed);
                    tab::MixedDataset cont = sample_sphere_dataset(ds.spec);
                    if (modality == "multimodal") {
                        std::vector<int> features;
                        for (int f = 0; f < (dims + 1) / 2; ++f) features.push_back(f);
                        auto dr = discretize(cont, features, cfg.bins, seed);
                        ds.data = std::move(dr.data);
                        ds.bin_maps = std::move(dr.bin_maps);
                    } else {
                        ds.data = std::move(cont);
                    }
                    out.push_back(std::move(ds));
                }
            }
        }
    }
    return out;
}

std::string sidecar_json(const BenchmarkDataset& ds) {
    json j;
    j["dims"] = ds.spec.dims;
    j["n_samples"] = ds.spec.n_samples;
    j["alpha"] = ds.spec.slice_alpha;
    j["mu"] = ds.spec.minority_frac;
    j["seed"] = ds.spec.seed;
    std::vector<double> rot;
    for (Eigen::Index i = 0; i < ds.spec.rotation.rows(); ++i)
        for (Eigen::Index c = 0; c < ds.spec.rotation.cols(); ++c)
            rot.push_back(ds.spec.rotation(i, c));
    j["rotation_row_major"] = rot;
    j["bin_maps"] = json::array();
    for (const auto& bm : ds.bin_maps)
        j["bin_maps"].push_back(
            {{"column", bm.column}, {"bins", bm.bins}, {"perm", bm.perm}});
    return j.dump(2);
}

}  // namespace taei::bench
