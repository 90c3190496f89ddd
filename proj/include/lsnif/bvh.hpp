#pragma once

#include "lsnif/geometry.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace lsnif {

// Binary BVH over opaque primitives identified by index. Interior nodes use
// child indices, leaves reference a contiguous range of `prim_order`.
struct BvhNode {
  Aabb bounds;
  int left = -1;
  int right = -1;
  int first = 0;
  int count = 0;  // > 0 marks a leaf

  bool leaf() const { return count > 0; }
};

struct Bvh {
  std::vector<BvhNode> nodes;
  std::vector<int> prim_order;

  bool empty() const { return nodes.empty(); }
};

// Binned SAH (16 bins) with a median-split fallback; leaves hold at most two
// primitives. Throws std::invalid_argument on an empty input.
Bvh build_bvh(const std::vector<Aabb>& boxes);

// Möller–Trumbore, double-sided, determinant cutoff 1e-9. Barycentrics (u, v)
// weight corners b and c. Accepts non-unit directions so instanced traversal
// can keep the world-ray parameterization.
struct TriangleHit {
  Real t = 0;
  Real u = 0;
  Real v = 0;
  int face = -1;
};
std::optional<TriangleHit> intersect_triangle(const Ray& ray, const Vec3& a,
                                              const Vec3& b, const Vec3& c);

// Closest triangle hit; equal-t ties resolve to the lower face index so the
// result is independent of traversal order.
std::optional<TriangleHit> intersect_closest(const Bvh& bvh, const Mesh& mesh,
                                             const Ray& ray);
bool intersect_any(const Bvh& bvh, const Mesh& mesh, const Ray& ray);

// Invokes fn(primitive) for every leaf primitive whose node interval overlaps
// the ray segment. Used by the broad phase over object AABBs.
void for_each_candidate(const Bvh& bvh, const Ray& ray,
                        const std::function<void(int)>& fn);

// Full hit information at a triangle hit: shading normal flipped to face the
// ray, material/albedo looked up from the mesh table.
struct HitRecord {
  Real t = 0;
  Vec3 position = Vec3::Zero();
  Vec3 shading_normal = Vec3::UnitZ();
  Vec3 albedo = Vec3::Zero();
  int material_index = 0;
  int object_index = -1;
  int primitive_index = -1;
};
HitRecord make_hit_record(const Mesh& mesh, const Ray& ray, const TriangleHit& hit,
                          int object_index);

// Recursive containment check used by tests: child bounds inside parent
// bounds, every primitive in exactly one leaf, leaf primitives inside the
// leaf bounds (for the boxes the tree was built from).
bool bvh_is_consistent(const Bvh& bvh, const std::vector<Aabb>& boxes);

}  // namespace lsnif
