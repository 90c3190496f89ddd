#include "lsnif/voxel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace lsnif {

OccupancyGrid::OccupancyGrid(int resolution) : res_(resolution) {
  if (resolution < 2 || resolution > 256 || (resolution & (resolution - 1)) != 0)
    throw std::invalid_argument("occupancy resolution must be a power of two in [2, 256]");
  bits_.assign(static_cast<std::size_t>(resolution) * resolution * resolution / 8, 0);
}

bool OccupancyGrid::occupied(int ix, int iy, int iz) const {
  if (ix < 0 || iy < 0 || iz < 0 || ix >= res_ || iy >= res_ || iz >= res_)
    throw std::out_of_range("occupancy index out of range");
  return occupied_unchecked(ix, iy, iz);
}

void OccupancyGrid::set(int ix, int iy, int iz) {
  if (ix < 0 || iy < 0 || iz < 0 || ix >= res_ || iy >= res_ || iz >= res_)
    throw std::out_of_range("occupancy index out of range");
  const std::size_t i = linear(ix, iy, iz);
  bits_[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
}

long OccupancyGrid::popcount() const {
  long n = 0;
  for (std::uint8_t b : bits_) n += std::popcount(b);
  return n;
}

namespace {

// Akenine-Möller style axis tests against a box centered at the origin.
// Separation requires a strict gap, so exact contact registers as overlap.
inline bool axis_separates(Real pa, Real pb, Real pc, Real rad) {
  const Real lo = std::min(pa, std::min(pb, pc));
  const Real hi = std::max(pa, std::max(pb, pc));
  return lo > rad || hi < -rad;
}

}  // namespace

bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a,
                          const Vec3& b, const Vec3& c) {
  const Vec3 v0 = a - center;
  const Vec3 v1 = b - center;
  const Vec3 v2 = c - center;

  // 3 box face normals.
  for (int i = 0; i < 3; ++i)
    if (axis_separates(v0[i], v1[i], v2[i], half[i])) return false;

  const Vec3 e0 = v1 - v0;
  const Vec3 e1 = v2 - v1;
  const Vec3 e2 = v0 - v2;

  // 9 edge cross-product axes.
  const Vec3 edges[3] = {e0, e1, e2};
  for (const Vec3& e : edges) {
    for (int i = 0; i < 3; ++i) {
      Vec3 axis = Vec3::Zero();
      axis[i] = Real(1);
      const Vec3 n = axis.cross(e);
      const Real rad = half[0] * std::abs(n[0]) + half[1] * std::abs(n[1]) +
                       half[2] * std::abs(n[2]);
      if (axis_separates(n.dot(v0), n.dot(v1), n.dot(v2), rad)) return false;
    }
  }

  // Triangle plane.
  const Vec3 normal = e0.cross(e1);
  const Real d = normal.dot(v0);
  const Real rad = half[0] * std::abs(normal[0]) + half[1] * std::abs(normal[1]) +
                   half[2] * std::abs(normal[2]);
  return std::abs(d) <= rad;
}

OccupancyGrid voxelize_surface(const Mesh& mesh, const LocalFrame& frame,
                               int resolution) {
  OccupancyGrid grid(resolution);
  const Real res = static_cast<Real>(resolution);
  const Real cell = Real(1) / res;
  const Vec3 half = Vec3::Constant(Real(0.5) * cell);

  // Candidate cells are those whose closed box meets the triangle's closed
  // AABB: i/res <= hi and (i+1)/res >= lo.
  auto range_lo = [&](Real lo) {
    return std::max(0, static_cast<int>(std::ceil(lo * res - Real(1))));
  };
  auto range_hi = [&](Real hi) {
    return std::min(resolution - 1, static_cast<int>(std::floor(hi * res)));
  };

  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Vec3i& face = mesh.faces[f];
    const Vec3 a = frame.to_local(mesh.vertices[face[0]]);
    const Vec3 b = frame.to_local(mesh.vertices[face[1]]);
    const Vec3 c = frame.to_local(mesh.vertices[face[2]]);

    const Vec3 lo = a.cwiseMin(b).cwiseMin(c);
    const Vec3 hi = a.cwiseMax(b).cwiseMax(c);
    const int x0 = range_lo(lo.x()), x1 = range_hi(hi.x());
    const int y0 = range_lo(lo.y()), y1 = range_hi(hi.y());
    const int z0 = range_lo(lo.z()), z1 = range_hi(hi.z());

    const bool degenerate = (b - a).cross(c - a).norm() < Real(1e-16);

    for (int iz = z0; iz <= z1; ++iz) {
      for (int iy = y0; iy <= y1; ++iy) {
        for (int ix = x0; ix <= x1; ++ix) {
          if (degenerate) {
            grid.set(ix, iy, iz);  // AABB footprint for zero-area slivers
            continue;
          }
          const Vec3 center((ix + Real(0.5)) * cell, (iy + Real(0.5)) * cell,
                            (iz + Real(0.5)) * cell);
          if (triangle_box_overlap(center, half, a, b, c)) grid.set(ix, iy, iz);
        }
      }
    }
  }
  return grid;
}

}  // namespace lsnif
