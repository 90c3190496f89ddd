#pragma once

#include "lsnif/geometry.hpp"

namespace lsnif {

// Procedural fixture meshes; all centered at the origin with vertex normals.
Mesh make_uv_sphere(Real radius = Real(1), int segments = 32, int rings = 16);
Mesh make_box(const Vec3& half_extent = Vec3::Ones());
Mesh make_torus(Real major_radius = Real(1), Real minor_radius = Real(0.35),
                int segments = 48, int rings = 24);
// Axis-aligned rectangle in the plane with the given normal axis; handy for
// building Cornell-style rooms out of wall quads.
Mesh make_quad(const Vec3& corner, const Vec3& edge_u, const Vec3& edge_v);

}  // namespace lsnif
