#include "taei/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "taei/interpolate.hpp"

namespace taei::metrics {

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc_auc: size mismatch");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int l : labels) n_pos += (l == 1);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc_auc: both classes required");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return scores[a] < scores[b]; });

    // midranks over tie groups, then the rank-sum statistic
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t t = i; t < j; ++t)
            if (labels[order[t]] == 1) pos_rank_sum += midrank;
        i = j;
    }
    return (pos_rank_sum - 0.5 * n_pos * (n_pos + 1)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<double> knn_classifier_scores(const tab::MixedDataset& train,
                                          const tab::MixedDataset& query, int k) {
    const int n = static_cast<int>(train.size());
    if (n == 0) throw std::invalid_argument("knn_classifier: empty train set");
    if (k > n) throw std::invalid_argument("knn_classifier: k exceeds train size");

    const tab::MixedDataset minority = train.minority_rows();
    const double med = interp::nc_median_std(minority.continuous);

    std::vector<double> out;
    out.reserve(query.size());
    for (Eigen::Index q = 0; q < query.size(); ++q) {
        std::vector<std::pair<double, int>> cand;
        cand.reserve(n);
        for (int i = 0; i < n; ++i)
            cand.emplace_back(
                interp::nc_distance(query.continuous.row(q), query.categorical.row(q),
                                    train.continuous.row(i), train.categorical.row(i),
                                    med),
                i);
        std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
        std::sort(cand.begin(), cand.begin() + k);
        int hits = 0;
        for (int t = 0; t < k; ++t) hits += train.labels(cand[t].second);
        out.push_back(static_cast<double>(hits) / k);
    }
    return out;
}

}  // namespace taei::metrics
