#include "lsnif/dda.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lsnif {
namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();

// Slab clip against the unit cube; enter_axis reports which axis produced the
// final entry parameter, or -1 when the start point already lies inside.
inline bool slab_interval(const Vec3& o, const Vec3& d, Real t_min, Real t_max,
                          Real& t0, Real& t1, int& enter_axis) {
  t0 = t_min;
  t1 = t_max;
  enter_axis = -1;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == Real(0)) {
      if (o[a] < Real(0) || o[a] > Real(1)) return false;
      continue;
    }
    const Real inv = Real(1) / d[a];
    Real ta = (Real(0) - o[a]) * inv;
    Real tb = (Real(1) - o[a]) * inv;
    if (ta > tb) std::swap(ta, tb);
    if (ta > t0) {
      t0 = ta;
      enter_axis = a;
    }
    if (tb < t1) t1 = tb;
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

void collect_boundary_hits_local(const Vec3& origin, const Vec3& direction,
                                 Real t_min, Real t_max, const OccupancyGrid& grid,
                                 int cap, BoundaryHits& out) {
  out.clear();
  if (cap < 1) throw std::invalid_argument("hit cap must be >= 1");
  const int res = grid.resolution();
  const Real fres = static_cast<Real>(res);

  // Deterministic stepping on exact grid planes: nudge the affected axes.
  Vec3 o = origin;
  for (int a = 0; a < 3; ++a) {
    const Real scaled = o[a] * fres;
    if (scaled == std::floor(scaled)) o[a] += Real(1e-7);
  }

  Real t0, t1;
  int entry_axis;
  if (!slab_interval(o, direction, t_min, t_max, t0, t1, entry_axis)) return;

  const Vec3 start = o + t0 * direction;
  int cell[3];
  int step[3];
  Real t_next[3];
  Real t_delta[3];
  for (int a = 0; a < 3; ++a) {
    cell[a] = std::clamp(static_cast<int>(std::floor(start[a] * fres)), 0, res - 1);
    if (direction[a] > Real(0)) {
      step[a] = 1;
      t_delta[a] = Real(1) / (fres * direction[a]);
      t_next[a] = t0 + ((cell[a] + 1) / fres - start[a]) / direction[a];
    } else if (direction[a] < Real(0)) {
      step[a] = -1;
      t_delta[a] = Real(-1) / (fres * direction[a]);
      t_next[a] = t0 + (cell[a] / fres - start[a]) / direction[a];
    } else {
      step[a] = 0;
      t_delta[a] = kInf;
      t_next[a] = kInf;
    }
  }

  Real entry_t = t0;
  Vec3 entry_point = start;
  // Plane coordinate (in grid units) of the face the ray entered through;
  // negative means the start point is the ray origin inside the cube.
  Real entry_plane = -1;
  if (entry_axis >= 0) entry_plane = std::round(start[entry_axis] * fres);

  while (true) {
    if (grid.occupied_unchecked(cell[0], cell[1], cell[2])) {
      Vec3 p = entry_point;
      if (entry_axis >= 0) {
        p[entry_axis] = entry_plane / fres;
      } else if (out.points.empty()) {
        out.first_is_origin = true;
      }
      out.points.push_back(p);
      out.t_values.push_back(entry_t);
      out.cells.emplace_back(cell[0], cell[1], cell[2]);
      if (out.count() >= cap) return;
    }

    // Step to the neighbor with the nearest boundary crossing.
    int axis = 0;
    if (t_next[1] < t_next[axis]) axis = 1;
    if (t_next[2] < t_next[axis]) axis = 2;
    if (t_next[axis] > t1) return;

    entry_t = t_next[axis];
    // The crossing plane is the shared face between the old and new cell.
    entry_plane = static_cast<Real>(step[axis] > 0 ? cell[axis] + 1 : cell[axis]);
    cell[axis] += step[axis];
    if (cell[axis] < 0 || cell[axis] >= res) return;
    entry_point = o + entry_t * direction;
    entry_axis = axis;
    t_next[axis] += t_delta[axis];
  }
}

void collect_boundary_hits(const Ray& world_ray, const LocalFrame& frame,
                           const OccupancyGrid& grid, int cap, BoundaryHits& out) {
  const Vec3 o = frame.to_local(world_ray.origin);
  const Vec3 d = world_ray.direction.cwiseProduct(frame.inv_extent);
  collect_boundary_hits_local(o, d, world_ray.t_min, world_ray.t_max, grid, cap, out);
}

BoundaryHits collect_boundary_hits(const Ray& world_ray, const LocalFrame& frame,
                                   const OccupancyGrid& grid, int cap) {
  BoundaryHits out;
  collect_boundary_hits(world_ray, frame, grid, cap, out);
  return out;
}

}  // namespace lsnif
