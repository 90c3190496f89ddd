#pragma once

#include "lsnif/geometry.hpp"

#include <cstdint>
#include <vector>

namespace lsnif {

// Bit-packed binary occupancy over the local unit cube. Linear index order is
// x fastest, then y, then z; bit k of byte b is linear index 8*b + k.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(int resolution);

  int resolution() const { return res_; }
  bool occupied(int ix, int iy, int iz) const;  // throws std::out_of_range
  void set(int ix, int iy, int iz);
  bool occupied_unchecked(int ix, int iy, int iz) const {
    const std::size_t i = linear(ix, iy, iz);
    return (bits_[i >> 3] >> (i & 7)) & 1u;
  }
  long popcount() const;

  const std::vector<std::uint8_t>& bytes() const { return bits_; }
  std::vector<std::uint8_t>& bytes() { return bits_; }

 private:
  std::size_t linear(int ix, int iy, int iz) const {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(res_) *
               (static_cast<std::size_t>(iy) + static_cast<std::size_t>(res_) * iz);
  }
  int res_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Separating-axis triangle/box overlap (13 axes), closed: touching counts as
// overlap. Box given by center and half extents.
bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a,
                          const Vec3& b, const Vec3& c);

// Surface voxelization: a cell is set iff some triangle overlaps its closed
// box, so geometry exactly on a cell boundary marks both neighbors.
// Zero-area triangles fall back to their AABB footprint. Resolution must be a
// power of two in [2, 256].
OccupancyGrid voxelize_surface(const Mesh& mesh, const LocalFrame& frame,
                               int resolution);

}  // namespace lsnif
