#pragma once

#include "lsnif/types.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace lsnif {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
  Real t_min = Real(0);
  Real t_max = std::numeric_limits<Real>::infinity();

  Vec3 at(Real t) const { return origin + t * direction; }
};

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<Real>::max());
  Vec3 max = Vec3::Constant(std::numeric_limits<Real>::lowest());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }
  bool valid() const { return (min.array() <= max.array()).all(); }
  Vec3 center() const { return Real(0.5) * (min + max); }
  Vec3 extent() const { return max - min; }
  Real diagonal() const { return extent().norm(); }
  Real surface_area() const {
    const Vec3 e = extent();
    return Real(2) * (e.x() * e.y() + e.y() * e.z() + e.z() * e.x());
  }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

// Parametric overlap of a ray with an AABB, already clipped to the ray's
// [t_min, t_max]. For an origin inside the box, enter == ray.t_min.
struct RayInterval {
  Real enter = Real(0);
  Real exit = Real(0);
};

std::optional<RayInterval> ray_aabb_intersect(const Ray& ray, const Aabb& box);

enum class MaterialKind { diffuse, glossy };

struct Material {
  Vec3 albedo = Vec3::Constant(Real(0.7));
  MaterialKind kind = MaterialKind::diffuse;
  Real roughness = Real(0.5);  // glossy only, in (0, 1]
};

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3i> faces;
  // Per-corner normal indices into `normals`, parallel to `faces`. Empty when
  // the source mesh carries no vertex normals; shading then falls back to the
  // geometric face normal.
  std::vector<Vec3> normals;
  std::vector<Vec3i> face_normals;
  std::vector<int> face_material;    // one slot per face, < materials.size()
  std::vector<Material> materials;   // N_mat >= 1

  int n_faces() const { return static_cast<int>(faces.size()); }
  int n_materials() const { return static_cast<int>(materials.size()); }
  bool has_vertex_normals() const { return !face_normals.empty(); }

  Aabb bounds() const;
  Vec3 geometric_normal(int face) const;  // unit, zero for degenerate faces
  Real face_area(int face) const;
  Real total_area() const;
  // Barycentric vertex-normal interpolation when present, geometric otherwise.
  // (u, v) weight the second and third corner.
  Vec3 shading_normal(int face, Real u, Real v) const;
  void validate() const;  // throws std::runtime_error on inconsistent indices
};

// Maps the (inflated) mesh AABB to the local unit cube with per-axis scale.
struct LocalFrame {
  Aabb aabb;
  Vec3 inv_extent = Vec3::Ones();

  static LocalFrame for_aabb(Aabb box);
  static LocalFrame for_mesh(const Mesh& mesh);

  Vec3 to_local(const Vec3& p) const {
    return (p - aabb.min).cwiseProduct(inv_extent);
  }
  Vec3 from_local(const Vec3& q) const {
    return aabb.min + q.cwiseProduct(aabb.extent());
  }
};

inline Vec3 transform_point(const Affine& m, const Vec3& p) { return m * p; }
inline Vec3 transform_vector(const Affine& m, const Vec3& v) { return m.linear() * v; }
inline Vec3 transform_normal(const Affine& inv, const Vec3& n) {
  return inv.linear().transpose() * n;
}
Aabb transform_aabb(const Affine& m, const Aabb& box);

}  // namespace lsnif
