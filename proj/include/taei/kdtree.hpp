#pragma once
#include <Eigen/Dense>
#include <vector>

namespace taei::knn {

using Eigen::MatrixXd;

struct Neighbor {
    int index = -1;
    double dist = 0.0;
};

// Exact k-d tree over the rows of a fixed point set. Results are identical
// to a brute-force scan, ties broken by lower row index.
class KdTree {
public:
    explicit KdTree(MatrixXd points);

    // k nearest to `query`, sorted by (distance, index); `exclude` skips one
    // stored row (self-queries).
    std::vector<Neighbor> query(const Eigen::RowVectorXd& query, int k,
                                int exclude = -1) const;

    Eigen::Index size() const { return points_.rows(); }
    const MatrixXd& points() const { return points_; }

private:
    struct Node {
        int left = -1, right = -1;
        int begin = 0, end = 0;  // leaf range into order_
        int axis = -1;
        double split = 0.0;
    };

    int build(int begin, int end, int depth);
    void search(int node, const Eigen::RowVectorXd& q, int k, int exclude,
                std::vector<Neighbor>& heap) const;

    MatrixXd points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

// O(N) scan with the same tie rule; the oracle the tree is tested against.
std::vector<Neighbor> brute_force_knn(const MatrixXd& points,
                                      const Eigen::RowVectorXd& query, int k,
                                      int exclude = -1);

}  // namespace taei::knn
