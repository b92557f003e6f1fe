#include "taei/kdtree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace taei::knn {

namespace {

constexpr int kLeafSize = 16;

// max-heap order on (dist, index): the worst candidate sits on top
bool worse(const Neighbor& a, const Neighbor& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.index < b.index;
}

void heap_push(std::vector<Neighbor>& heap, const Neighbor& n, int k) {
    if (static_cast<int>(heap.size()) < k) {
        heap.push_back(n);
        std::push_heap(heap.begin(), heap.end(), worse);
    } else if (worse(n, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), worse);
        heap.back() = n;
        std::push_heap(heap.begin(), heap.end(), worse);
    }
}

}  // namespace

KdTree::KdTree(MatrixXd points) : points_(std::move(points)) {
    order_.resize(points_.rows());
    std::iota(order_.begin(), order_.end(), 0);
    if (!order_.empty()) root_ = build(0, static_cast<int>(order_.size()), 0);
}

int KdTree::build(int begin, int end, int depth) {
    Node node;
    node.begin = begin;
    node.end = end;
    if (end - begin <= kLeafSize) {
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    const int axis = depth % static_cast<int>(points_.cols());
    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](int a, int b) {
                         return points_(a, axis) < points_(b, axis);
                     });
    node.axis = axis;
    node.split = points_(order_[mid], axis);
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid, end, depth + 1);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

void KdTree::search(int node_id, const Eigen::RowVectorXd& q, int k, int exclude,
                    std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const int idx = order_[i];
            if (idx == exclude) continue;
            heap_push(heap, {idx, (points_.row(idx) - q).norm()}, k);
        }
        return;
    }
    const double delta = q(node.axis) - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, q, k, exclude, heap);
    if (static_cast<int>(heap.size()) < k || std::abs(delta) <= heap.front().dist)
        search(far, q, k, exclude, heap);
}

std::vector<Neighbor> KdTree::query(const Eigen::RowVectorXd& q, int k,
                                    int exclude) const {
    if (k <= 0) throw std::invalid_argument("knn: k must be positive");
    const int avail = static_cast<int>(points_.rows()) - (exclude >= 0 ? 1 : 0);
    if (k > avail) throw std::invalid_argument("knn: k exceeds point count");
    std::vector<Neighbor> heap;
    heap.reserve(k + 1);
    search(root_, q, k, exclude, heap);
    std::sort(heap.begin(), heap.end(), worse);
    return heap;
}

std::vector<Neighbor> brute_force_knn(const MatrixXd& points,
                                      const Eigen::RowVectorXd& query, int k,
                                      int exclude) {
    std::vector<Neighbor> all;
    all.reserve(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        if (static_cast<int>(i) == exclude) continue;
        all.push_back({static_cast<int>(i), (points.row(i) - query).norm()});
    }
    if (k > static_cast<int>(all.size()))
        throw std::invalid_argument("knn: k exceeds point count");
    std::sort(all.begin(), all.end(), worse);
    all.resize(k);
    return all;
}

}  // namespace taei::knn
