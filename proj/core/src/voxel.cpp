#include "mavtrack/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mav {
namespace {

constexpr std::int64_t kBias = 1 << 20;  // supports coordinates to +-1M cells

std::int64_t pack(std::int64_t x, std::int64_t y, std::int64_t z) {
  return ((x + kBias) << 42) | ((y + kBias) << 21) | (z + kBias);
}

std::int64_t cell_of(double v, double size) {
  return static_cast<std::int64_t>(std::floor(v / size));
}

}  // namespace

VoxelCloud::VoxelCloud(double voxel_size) : size_(voxel_size) {
  if (!(voxel_size > 0.0))
    throw std::invalid_argument("voxel size must be positive");
}

void VoxelCloud::insert(const Vec3& p) {
  cells_.insert(pack(cell_of(p.x(), size_), cell_of(p.y(), size_),
                     cell_of(p.z(), size_)));
}

void VoxelCloud::insert_box(const Aabb& box) {
  const Vec3 lo = box.min(), hi = box.max();
  for (std::int64_t x = cell_of(lo.x(), size_); x <= cell_of(hi.x(), size_); ++x)
    for (std::int64_t y = cell_of(lo.y(), size_); y <= cell_of(hi.y(), size_); ++y)
      for (std::int64_t z = cell_of(lo.z(), size_); z <= cell_of(hi.z(), size_); ++z)
        cells_.insert(pack(x, y, z));
}

std::vector<Vec3> VoxelCloud::centers() const {
  std::vector<std::int64_t> keys(cells_.begin(), cells_.end());
  std::sort(keys.begin(), keys.end());
  std::vector<Vec3> out;
  out.reserve(keys.size());
  for (std::int64_t k : keys) {
    const std::int64_t x = (k >> 42) - kBias;
    const std::int64_t y = ((k >> 21) & ((1 << 21) - 1)) - kBias;
    const std::int64_t z = (k & ((1 << 21) - 1)) - kBias;
    out.emplace_back((x + 0.5) * size_, (y + 0.5) * size_, (z + 0.5) * size_);
  }
  return out;
}

double iou(const VoxelCloud& a, const VoxelCloud& b) {
  if (a.voxel_size() != b.voxel_size())
    throw std::invalid_argument("voxel IoU requires equal voxel sizes");
  if (a.size() == 0 && b.size() == 0) return 1.0;
  const VoxelCloud& small = a.size() <= b.size() ? a : b;
  const VoxelCloud& large = a.size() <= b.size() ? b : a;
  std::size_t inter = 0;
  for (std::int64_t k : small.cells())
    if (large.contains_cell(k)) ++inter;
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace mav
