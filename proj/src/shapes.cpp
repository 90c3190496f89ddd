#include "lsnif/shapes.hpp"

#include <cmath>

namespace lsnif {
namespace {

constexpr Real kPi = Real(3.14159265358979323846);

void finalize(Mesh& mesh) {
  mesh.face_material.assign(mesh.faces.size(), 0);
  mesh.materials.assign(1, Material{});
  mesh.validate();
}

}  // namespace

Mesh make_uv_sphere(Real radius, int segments, int rings) {
  Mesh mesh;
  // Vertex ring layout: ring 0 = north pole row repeated is avoided by using
  // unique pole vertices.
  mesh.vertices.push_back(Vec3(0, radius, 0));
  mesh.normals.push_back(Vec3(0, 1, 0));
  for (int r = 1; r < rings; ++r) {
    const Real phi = kPi * Real(r) / Real(rings);
    for (int s = 0; s < segments; ++s) {
      const Real theta = Real(2) * kPi * Real(s) / Real(segments);
      const Vec3 n(std::sin(phi) * std::cos(theta), std::cos(phi),
                   std::sin(phi) * std::sin(theta));
      mesh.vertices.push_back(radius * n);
      mesh.normals.push_back(n);
    }
  }
  mesh.vertices.push_back(Vec3(0, -radius, 0));
  mesh.normals.push_back(Vec3(0, -1, 0));

  const int south = static_cast<int>(mesh.vertices.size()) - 1;
  auto ring_vertex = [&](int r, int s) { return 1 + (r - 1) * segments + (s % segments); };

  auto add_face = [&](int a, int b, int c) {
    mesh.faces.emplace_back(a, b, c);
    mesh.face_normals.emplace_back(a, b, c);
  };

  for (int s = 0; s < segments; ++s) add_face(0, ring_vertex(1, s + 1), ring_vertex(1, s));
  for (int r = 1; r < rings - 1; ++r) {
    for (int s = 0; s < segments; ++s) {
      const int a = ring_vertex(r, s), b = ring_vertex(r, s + 1);
      const int c = ring_vertex(r + 1, s), d = ring_vertex(r + 1, s + 1);
      add_face(a, b, d);
      add_face(a, d, c);
    }
  }
  for (int s = 0; s < segments; ++s)
    add_face(south, ring_vertex(rings - 1, s), ring_vertex(rings - 1, s + 1));

  finalize(mesh);
  return mesh;
}

Mesh make_box(const Vec3& half_extent) {
  Mesh mesh;
  const Vec3& h = half_extent;
  const int axes[6][2] = {{1, 2}, {2, 0}, {0, 1}, {2, 1}, {0, 2}, {1, 0}};
  for (int face = 0; face < 6; ++face) {
    const int axis = face % 3;
    const Real sign = face < 3 ? Real(1) : Real(-1);
    Vec3 n = Vec3::Zero();
    n[axis] = sign;
    Vec3 u = Vec3::Zero(), v = Vec3::Zero();
    u[axes[face][0]] = h[axes[face][0]];
    v[axes[face][1]] = h[axes[face][1]];
    const Vec3 c = n.cwiseProduct(h);
    const int base = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(c - u - v);
    mesh.vertices.push_back(c + u - v);
    mesh.vertices.push_back(c + u + v);
    mesh.vertices.push_back(c - u + v);
    for (int k = 0; k < 4; ++k) mesh.normals.push_back(n);
    mesh.faces.emplace_back(base, base + 1, base + 2);
    mesh.faces.emplace_back(base, base + 2, base + 3);
    mesh.face_normals.emplace_back(base, base + 1, base + 2);
    mesh.face_normals.emplace_back(base, base + 2, base + 3);
  }
  finalize(mesh);
  return mesh;
}

Mesh make_torus(Real major_radius, Real minor_radius, int segments, int rings) {
  Mesh mesh;
  for (int s = 0; s < segments; ++s) {
    const Real theta = Real(2) * kPi * Real(s) / Real(segments);
    const Vec3 center(major_radius * std::cos(theta), 0, major_radius * std::sin(theta));
    const Vec3 radial(std::cos(theta), 0, std::sin(theta));
    for (int r = 0; r < rings; ++r) {
      const Real phi = Real(2) * kPi * Real(r) / Real(rings);
      const Vec3 n = std::cos(phi) * radial + std::sin(phi) * Vec3(0, 1, 0);
      mesh.vertices.push_back(center + minor_radius * n);
      mesh.normals.push_back(n);
    }
  }
  auto vid = [&](int s, int r) { return (s % segments) * rings + (r % rings); };
  for (int s = 0; s < segments; ++s) {
    for (int r = 0; r < rings; ++r) {
      const int a = vid(s, r), b = vid(s + 1, r), c = vid(s + 1, r + 1), d = vid(s, r + 1);
      mesh.faces.emplace_back(a, b, c);
      mesh.faces.emplace_back(a, c, d);
      mesh.face_normals.emplace_back(a, b, c);
      mesh.face_normals.emplace_back(a, c, d);
    }
  }
  finalize(mesh);
  return mesh;
}

Mesh make_quad(const Vec3& corner, const Vec3& edge_u, const Vec3& edge_v) {
  Mesh mesh;
  const Vec3 n = edge_u.cross(edge_v).normalized();
  mesh.vertices = {corner, corner + edge_u, corner + edge_u + edge_v, corner + edge_v};
  mesh.normals.assign(4, n);
  mesh.faces = {Vec3i(0, 1, 2), Vec3i(0, 2, 3)};
  mesh.face_normals = {Vec3i(0, 1, 2), Vec3i(0, 2, 3)};
  finalize(mesh);
  return mesh;
}

}  // namespace lsnif
