#pragma once

#include "lsnif/geometry.hpp"
#include "lsnif/voxel.hpp"

#include <vector>

namespace lsnif {

// Ordered entry points into occupied voxels along a ray, in local unit-cube
// coordinates. t_values share the parameterization of the query ray, so they
// are directly comparable with world hit distances.
struct BoundaryHits {
  std::vector<Vec3> points;
  std::vector<Real> t_values;
  std::vector<Vec3i> cells;  // the occupied cell each point enters
  // True when the first point is the ray origin inside an occupied cell
  // rather than a voxel-face crossing.
  bool first_is_origin = false;

  int count() const { return static_cast<int>(points.size()); }
  void clear() {
    points.clear();
    t_values.clear();
    cells.clear();
    first_is_origin = false;
  }
};

// Amanatides–Woo traversal from the ray's box entry to its exit, recording
// the entry point of each occupied cell until `cap` points are collected.
// Origins exactly on a grid plane are nudged by +1e-7 per affected axis
// before traversal to make stepping deterministic. A ray that misses the
// AABB yields an empty result.
void collect_boundary_hits(const Ray& world_ray, const LocalFrame& frame,
                           const OccupancyGrid& grid, int cap, BoundaryHits& out);
BoundaryHits collect_boundary_hits(const Ray& world_ray, const LocalFrame& frame,
                                   const OccupancyGrid& grid, int cap);

// Same traversal on a ray already expressed in local coordinates (origin in
// the unit cube frame, direction unnormalized so t keeps its original
// meaning).
void collect_boundary_hits_local(const Vec3& origin, const Vec3& direction,
                                 Real t_min, Real t_max, const OccupancyGrid& grid,
                                 int cap, BoundaryHits& out);

}  // namespace lsnif
