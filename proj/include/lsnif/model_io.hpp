#pragma once

#include "lsnif/encoding.hpp"
#include "lsnif/geometry.hpp"
#include "lsnif/mlp.hpp"
#include "lsnif/voxel.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace lsnif {

// The serialized bundle that stands in for one object's bottom-level BVH:
// occupancy voxels, hash-grid tables, MLP weights, material table and the
// local-frame AABB. Tables and weights are stored in half precision; the
// AABB and materials keep full precision.
struct LsnifModel {
  int voxel_res = 32;
  int hit_cap = 18;
  OccupancyGrid occupancy;
  SparseHashGrid grid;
  MlpParams mlp;
  std::vector<Material> materials;
  Aabb aabb;

  int n_mat() const { return static_cast<int>(materials.size()); }
  int input_width() const { return mlp.input_width(); }
  LocalFrame frame() const {
    // The stored box is already the inflated training frame.
    LocalFrame f;
    f.aabb = aabb;
    f.inv_extent = aabb.extent().cwiseInverse();
    return f;
  }
};

// File layout (little-endian): magic "LSNF", version u32, then
// u32 V, H, L, F, M, hidden width, N_mat; occupancy bits (V^3/8 bytes);
// per level u32 resolution followed by M*F binary16 entries (entry-major);
// MLP tensors W1,b1,W2,b2,W3,b3 as binary16, matrices row-major; material
// table (count u32, then albedo 3xf32 + kind u32 + roughness f32 each);
// AABB as 6xf32.
void save_model(const LsnifModel& model, const std::string& path);
LsnifModel load_model(const std::string& path);

struct Footprint {
  std::size_t voxels = 0;
  std::size_t encoder = 0;
  std::size_t mlp = 0;
  std::size_t total = 0;     // voxels + encoder + mlp
  std::size_t overhead = 0;  // header + materials + aabb, reported separately
};
Footprint footprint(const LsnifModel& model);

}  // namespace lsnif
