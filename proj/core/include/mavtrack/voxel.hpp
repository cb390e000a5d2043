#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "mavtrack/geometry.hpp"

namespace mav {

/// Occupied-voxel set over a uniform world-frame grid.
class VoxelCloud {
 public:
  explicit VoxelCloud(double voxel_size = 0.1);

  void insert(const Vec3& p);
  /// Marks every voxel whose cell overlaps the box.
  void insert_box(const Aabb& box);

  std::size_t size() const { return cells_.size(); }
  double voxel_size() const { return size_; }
  bool contains_cell(std::int64_t key) const { return cells_.count(key) > 0; }
  const std::unordered_set<std::int64_t>& cells() const { return cells_; }

  /// Voxel centers, sorted (stable export for CSV/plotting).
  std::vector<Vec3> centers() const;

 private:
  double size_;
  std::unordered_set<std::int64_t> cells_;
};

/// |a n b| / |a u b|; 1.0 when both empty. Throws on mismatched voxel sizes.
double iou(const VoxelCloud& a, const VoxelCloud& b);

}  // namespace mav
