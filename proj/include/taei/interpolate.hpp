#pragma once
#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "taei/kdtree.hpp"
#include "taei/tabular.hpp"

namespace taei::interp {

using Eigen::MatrixXd;
using Eigen::MatrixXi;

struct Provenance {
    int base = -1;
    int neighbor = -1;  // == base for plain copies
    double t = 0.0;
};

struct SyntheticBatch {
    MatrixXd continuous;   // n_syn x |C|
    MatrixXi categorical;  // n_syn x |D| (0 cols when not applicable)
    std::vector<Provenance> provenance;

    Eigen::Index size() const { return continuous.rows(); }
};

// sqrt( sum_cont (a-b)^2 + med^2 * #differing categoricals )
double nc_distance(const Eigen::RowVectorXd& a_cont, const Eigen::RowVectorXi& a_cat,
                   const Eigen::RowVectorXd& b_cont, const Eigen::RowVectorXi& b_cat,
                   double med);

// Median of per-continuous-column sample standard deviations.
double nc_median_std(const MatrixXd& cont);

SyntheticBatch ros(const MatrixXd& cont, const MatrixXi& cat, int n_syn,
                   std::uint64_t seed);

struct SmoteOptions {
    int k = 5;
    // test hook for the reduction property t == 0 -> ros over base rows
    std::optional<double> forced_t;
};

SyntheticBatch smote(const MatrixXd& points, int n_syn, std::uint64_t seed,
                     const SmoteOptions& opt = {});

SyntheticBatch smote_nc(const MatrixXd& cont, const MatrixXi& cat, int n_syn,
                        std::uint64_t seed, int k = 5);

SyntheticBatch poly_star(const MatrixXd& points, int n_syn, std::uint64_t seed);

}  // namespace taei::interp
