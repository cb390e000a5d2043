#pragma once

#include <vector>

#include "mavtrack/geometry.hpp"

namespace mav {

/// Static 3-d tree over a point set; supports exact radius queries.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }

  /// Indices (into the construction order) of all points with
  /// |p - center| <= radius.
  std::vector<std::size_t> radius_query(const Vec3& center, double radius) const;

  const Vec3& point(std::size_t i) const { return points_[i]; }

 private:
  struct Node {
    int axis;             // -1 marks a leaf
    double split;
    std::int32_t left, right;      // children, -1 if none
    std::int32_t begin, end;       // leaf range into order_
  };

  std::int32_t build(std::int32_t begin, std::int32_t end);
  void query(std::int32_t node, const Vec3& center, double radius, double r2,
             std::vector<std::size_t>& out) const;

  std::vector<Vec3> points_;
  std::vector<std::int32_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace mav
