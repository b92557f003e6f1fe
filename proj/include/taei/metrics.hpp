#pragma once
#include <Eigen/Dense>
#include <vector>

#include "taei/tabular.hpp"

namespace taei::metrics {

// Probability that a random positive outranks a random negative, ties
// counted half (rank-sum formulation).
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Minority-probability scores: fraction of the k nearest training rows (under
// the mixed-type distance with the minority-class median-std penalty) that
// are minority.
std::vector<double> knn_classifier_scores(const tab::MixedDataset& train,
                                          const tab::MixedDataset& query, int k = 5);

}  // namespace taei::metrics
