#pragma once

#include "lsnif/bvh.hpp"
#include "lsnif/dda.hpp"
#include "lsnif/loss.hpp"
#include "lsnif/model_io.hpp"
#include "lsnif/sampling.hpp"

#include <cstdint>
#include <optional>
#include <ostream>

namespace lsnif {

struct TrainSample {
  Ray ray;
  BoundaryHits hits;
  bool target_occluded = false;
  Real target_local_t = Real(0);  // position within the ray-AABB interval
  Vec3 target_normal = Vec3::UnitZ();
  Vec3 target_albedo = Vec3::Zero();
  int target_material = 0;
};

struct TrainConfig {
  int steps = 2000;
  int batch = 1 << 14;  // desk-scale default
  Real lr = Real(0.01);
  int hit_cap = 18;    // H
  int voxel_res = 32;  // V
  std::vector<int> level_res = {64, 128};
  int f_dim = 3;
  std::uint32_t table_size = 1u << 17;
  int hidden_width = 128;
  Real external_mix = Real(0.5);  // fraction of rays originating outside
  std::uint64_t seed = 0;
  int workers = 1;  // 1 = deterministic reference mode
  int log_every = 10;
  std::ostream* log = nullptr;
};

// Origin uniform on the sphere circumscribing the AABB, direction
// cosine-weighted about the axis toward the sphere center.
Ray sample_external_ray(const Aabb& aabb, Rng& rng);

// Probes the surface with an external ray and respawns from the hit point,
// offset along the shading normal, with a cosine-weighted direction. Empty
// when the probe misses.
std::optional<Ray> sample_surface_ray(const Mesh& mesh, const Bvh& bvh,
                                      const LocalFrame& frame, Rng& rng);

// Ground-truth labels from the BVH oracle. False when the ray misses the
// frame AABB (no interval to express local_t in).
bool label_ray(TrainSample& sample, const Bvh& bvh, const Mesh& mesh,
               const LocalFrame& frame);

// One labeled sample with its DDA boundary hits filled in. External draws
// reject AABB misses; surface draws retry the probe up to 64 times before
// falling back to an external ray.
TrainSample draw_sample(bool external, const Mesh& mesh, const Bvh& bvh,
                        const LocalFrame& frame, const OccupancyGrid& occupancy,
                        int hit_cap, Rng& rng);

// Jointly optimizes the MLP and the hash grid with Adam on fresh balanced
// batches. Identical seeds give identical models for a fixed worker count.
LsnifModel train(const Mesh& mesh, const TrainConfig& config);

}  // namespace lsnif
