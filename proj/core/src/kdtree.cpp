#include "mavtrack/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace mav {

namespace {
constexpr std::int32_t kLeafSize = 16;
}

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(points_.size() / kLeafSize * 2 + 2);
  if (!points_.empty()) root_ = build(0, static_cast<std::int32_t>(points_.size()));
}

std::int32_t KdTree::build(std::int32_t begin, std::int32_t end) {
  const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({});
  Node n{};
  if (end - begin <= kLeafSize) {
    n.axis = -1;
    n.begin = begin;
    n.end = end;
    n.left = n.right = -1;
    nodes_[id] = n;
    return id;
  }
  Vec3 lo = points_[order_[begin]], hi = lo;
  for (std::int32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const std::int32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [&](std::int32_t a, std::int32_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  n.axis = axis;
  n.split = points_[order_[mid]][axis];
  n.begin = begin;
  n.end = end;
  nodes_[id] = n;  // placeholder before recursion may grow nodes_
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = n.split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::query(std::int32_t node, const Vec3& center, double radius,
                   double r2, std::vector<std::size_t>& out) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::int32_t i = n.begin; i < n.end; ++i) {
      const std::int32_t idx = order_[i];
      if ((points_[idx] - center).squaredNorm() <= r2)
        out.push_back(static_cast<std::size_t>(idx));
    }
    return;
  }
  const double d = center[n.axis] - n.split;
  // Points equal to the split value may sit on either side of the partition,
  // so both subtrees are visited whenever the slab is within the radius.
  if (d <= radius) query(n.left, center, radius, r2, out);
  if (d >= -radius) query(n.right, center, radius, r2, out);
}

std::vector<std::size_t> KdTree::radius_query(const Vec3& center,
                                              double radius) const {
  std::vector<std::size_t> out;
  if (root_ >= 0 && radius >= 0.0) query(root_, center, radius, radius * radius, out);
  return out;
}

}  // namespace mav
