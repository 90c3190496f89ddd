#include "lsnif/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lsnif {

std::optional<RayInterval> ray_aabb_intersect(const Ray& ray, const Aabb& box) {
  Real t0 = ray.t_min;
  Real t1 = ray.t_max;
  for (int a = 0; a < 3; ++a) {
    const Real o = ray.origin[a];
    const Real d = ray.direction[a];
    if (d == Real(0)) {
      if (o < box.min[a] || o > box.max[a]) return std::nullopt;
      continue;
    }
    const Real inv = Real(1) / d;
    Real ta = (box.min[a] - o) * inv;
    Real tb = (box.max[a] - o) * inv;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return RayInterval{t0, t1};
}

Aabb Mesh::bounds() const {
  Aabb b;
  for (const Vec3& v : vertices) b.extend(v);
  return b;
}

Vec3 Mesh::geometric_normal(int face) const {
  const Vec3i& f = faces[face];
  const Vec3 e0 = vertices[f[1]] - vertices[f[0]];
  const Vec3 e1 = vertices[f[2]] - vertices[f[0]];
  const Vec3 n = e0.cross(e1);
  const Real len = n.norm();
  return len > Real(0) ? Vec3(n / len) : Vec3::Zero();
}

Real Mesh::face_area(int face) const {
  const Vec3i& f = faces[face];
  const Vec3 e0 = vertices[f[1]] - vertices[f[0]];
  const Vec3 e1 = vertices[f[2]] - vertices[f[0]];
  return Real(0.5) * e0.cross(e1).norm();
}

Real Mesh::total_area() const {
  Real sum = 0;
  for (int f = 0; f < n_faces(); ++f) sum += face_area(f);
  return sum;
}

Vec3 Mesh::shading_normal(int face, Real u, Real v) const {
  if (has_vertex_normals()) {
    const Vec3i& fn = face_normals[face];
    const Vec3 n = (Real(1) - u - v) * normals[fn[0]] + u * normals[fn[1]] +
                   v * normals[fn[2]];
    const Real len = n.norm();
    if (len > Real(1e-12)) return n / len;
  }
  return geometric_normal(face);
}

void Mesh::validate() const {
  const int nv = static_cast<int>(vertices.size());
  const int nn = static_cast<int>(normals.size());
  if (materials.empty()) throw std::runtime_error("mesh has no material table");
  if (face_material.size() != faces.size())
    throw std::runtime_error("face_material size mismatch");
  if (!face_normals.empty() && face_normals.size() != faces.size())
    throw std::runtime_error("face_normals size mismatch");
  for (size_t i = 0; i < faces.size(); ++i) {
    const Vec3i& f = faces[i];
    for (int k = 0; k < 3; ++k)
      if (f[k] < 0 || f[k] >= nv)
        throw std::runtime_error("face vertex index out of range");
    if (!face_normals.empty()) {
      const Vec3i& fn = face_normals[i];
      for (int k = 0; k < 3; ++k)
        if (fn[k] < 0 || fn[k] >= nn)
          throw std::runtime_error("face normal index out of range");
    }
    if (face_material[i] < 0 || face_material[i] >= n_materials())
      throw std::runtime_error("face material index out of range");
  }
}

LocalFrame LocalFrame::for_aabb(Aabb box) {
  // Inflate so planar meshes never produce a zero-thickness slab.
  Real pad = Real(1e-4) * box.extent().maxCoeff();
  if (!(pad > Real(0))) pad = Real(1e-4);
  box.min -= Vec3::Constant(pad);
  box.max += Vec3::Constant(pad);
  LocalFrame frame;
  frame.aabb = box;
  frame.inv_extent = box.extent().cwiseInverse();
  return frame;
}

LocalFrame LocalFrame::for_mesh(const Mesh& mesh) {
  return for_aabb(mesh.bounds());
}

Aabb transform_aabb(const Affine& m, const Aabb& box) {
  Aabb out;
  for (int i = 0; i < 8; ++i) {
    const Vec3 corner(i & 1 ? box.max.x() : box.min.x(),
                      i & 2 ? box.max.y() : box.min.y(),
                      i & 4 ? box.max.z() : box.min.z());
    out.extend(transform_point(m, corner));
  }
  return out;
}

}  // namespace lsnif
