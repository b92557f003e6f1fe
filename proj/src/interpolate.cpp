#include "taei/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "taei/rng.hpp"

namespace taei::interp {

double nc_distance(const Eigen::RowVectorXd& a_cont, const Eigen::RowVectorXi& a_cat,
                   const Eigen::RowVectorXd& b_cont, const Eigen::RowVectorXi& b_cat,
                   double med) {
    double d2 = (a_cont - b_cont).squaredNorm();
    for (Eigen::Index j = 0; j < a_cat.size(); ++j)
        if (a_cat(j) != b_cat(j)) d2 += med * med;
    return std::sqrt(d2);
}

double nc_median_std(const MatrixXd& cont) {
    std::vector<double> stds;
    const double n = static_cast<double>(cont.rows());
    for (Eigen::Index c = 0; c < cont.cols(); ++c) {
        const double mean = cont.col(c).mean();
        const double ss = (cont.col(c).array() - mean).square().sum();
        stds.push_back(n > 1 ? std::sqrt(ss / (n - 1)) : 0.0);
    }
    if (stds.empty()) return 0.0;
    std::sort(stds.begin(), stds.end());
    const std::size_t m = stds.size();
    return m % 2 == 1 ? stds[m / 2] : 0.5 * (stds[m / 2 - 1] + stds[m / 2]);
}

SyntheticBatch ros(const MatrixXd& cont, const MatrixXi& cat, int n_syn,
                   std::uint64_t seed) {
    if (cont.rows() == 0) throw std::invalid_argument("ros: empty minority");
    Rng rng(seed);
    SyntheticBatch out;
    out.continuous.resize(n_syn, cont.cols());
    out.categorical.resize(n_syn, cat.cols());
    for (int i = 0; i < n_syn; ++i) {
        const int b = static_cast<int>(rng.below(cont.rows()));
        out.continuous.row(i) = cont.row(b);
        if (cat.cols() > 0) out.categorical.row(i) = cat.row(b);
        out.provenance.push_back({b, b, 0.0});
    }
    return out;
}

SyntheticBatch smote(const MatrixXd& points, int n_syn, std::uint64_t seed,
                     const SmoteOptions& opt) {
    const int n = static_cast<int>(points.rows());
    if (n == 0) throw std::invalid_argument("smote: empty minority");
    if (n == 1) return ros(points, MatrixXi(1, 0), n_syn, seed);
    int k = opt.k;
    if (n <= k) k = n - 1;  // degenerate fold: shrink rather than fail

    knn::KdTree tree(points);
    std::vector<std::vector<knn::Neighbor>> neighbors(n);
    for (int i = 0; i < n; ++i) neighbors[i] = tree.query(points.row(i), k, i);

    Rng rng(seed);
    SyntheticBatch out;
    out.continuous.resize(n_syn, points.cols());
    out.categorical.resize(n_syn, 0);
    for (int i = 0; i < n_syn; ++i) {
        const int b = static_cast<int>(rng.below(n));
        const int nb = neighbors[b][rng.below(k)].index;
        const double t = opt.forced_t ? *opt.forced_t : rng.uniform();
        out.continuous.row(i) = points.row(b) + t * (points.row(nb) - points.row(b));
        out.provenance.push_back({b, nb, t});
    }
    return out;
}

SyntheticBatch smote_nc(const MatrixXd& cont, const MatrixXi& cat, int n_syn,
                        std::uint64_t seed, int k) {
    const int n = static_cast<int>(cont.rows());
    if (cont.cols() == 0 || cat.cols() == 0)
        throw std::invalid_argument(
            "smote_nc: needs at least one continuous and one categorical column");
    if (n == 0) throw std::invalid_argument("smote_nc: empty minority");
    if (n == 1) return ros(cont, cat, n_syn, seed);
    if (n <= k) k = n - 1;

    const double med = nc_median_std(cont);
    // brute-force neighbor lists under the augmented metric
    std::vector<std::vector<int>> neighbors(n);
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<double, int>> cand;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            cand.emplace_back(
                nc_distance(cont.row(i), cat.row(i), cont.row(j), cat.row(j), med), j);
        }
        std::sort(cand.begin(), cand.end());
        for (int kk = 0; kk < k; ++kk) neighbors[i].push_back(cand[kk].second);
    }

    Rng rng(seed);
    SyntheticBatch out;
    out.continuous.resize(n_syn, cont.cols());
    out.categorical.resize(n_syn, cat.cols());
    for (int i = 0; i < n_syn; ++i) {
        const int b = static_cast<int>(rng.below(n));
        const int nb = neighbors[b][rng.below(k)];
        const double t = rng.uniform();
        out.continuous.row(i) = cont.row(b) + t * (cont.row(nb) - cont.row(b));
        for (Eigen::Index c = 0; c < cat.cols(); ++c) {
            std::map<int, int> votes;
            for (int nn : neighbors[b]) votes[cat(nn, c)] += 1;
            int best_code = -1, best_votes = -1;
            for (const auto& [code, v] : votes)
                if (v > best_votes) {  // map iterates codes ascending: ties -> lowest
                    best_code = code;
                    best_votes = v;
                }
            out.categorical(i, c) = best_code;
        }
        out.provenance.push_back({b, nb, t});
    }
    return out;
}

SyntheticBatch poly_star(const MatrixXd& points, int n_syn, std::uint64_t seed) {
    const int n = static_cast<int>(points.rows());
    if (n == 0) throw std::invalid_argument("poly_star: empty minority");
    if (n < 2) return ros(points, MatrixXi(n, 0), n_syn, seed);
    const Eigen::RowVectorXd centroid = points.colwise().mean();
    Rng rng(seed);
    SyntheticBatch out;
    out.continuous.resize(n_syn, points.cols());
    out.categorical.resize(n_syn, 0);
    for (int i = 0; i < n_syn; ++i) {
        const int b = static_cast<int>(rng.below(n));
        const double t = rng.uniform();
        out.continuous.row(i) = points.row(b) + t * (centroid - points.row(b));
        out.provenance.push_back({b, -1, t});  // neighbor slot unused: target is the centroid
    }
    return out;
}

}  // namespace taei::interp
