#include "lsnif/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lsnif {
namespace {

constexpr int kBins = 16;
constexpr int kLeafSize = 2;

struct BuildPrim {
  Aabb bounds;
  Vec3 centroid;
  int index;
};

Aabb bounds_of(const std::vector<BuildPrim>& prims, int first, int last) {
  Aabb b;
  for (int i = first; i < last; ++i) b.extend(prims[i].bounds);
  return b;
}

int build_node(std::vector<BvhNode>& nodes, std::vector<BuildPrim>& prims,
               int first, int last) {
  const int node_index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  nodes[node_index].bounds = bounds_of(prims, first, last);

  const int count = last - first;
  if (count <= kLeafSize) {
    nodes[node_index].first = first;
    nodes[node_index].count = count;
    return node_index;
  }

  Aabb centroid_bounds;
  for (int i = first; i < last; ++i) centroid_bounds.extend(prims[i].centroid);
  const Vec3 cext = centroid_bounds.extent();

  int best_axis = -1;
  int best_bin = -1;
  Real best_cost = std::numeric_limits<Real>::max();
  for (int axis = 0; axis < 3; ++axis) {
    if (cext[axis] <= Real(0)) continue;
    const Real scale = Real(kBins) / cext[axis];
    Aabb bin_bounds[kBins];
    int bin_count[kBins] = {};
    for (int i = first; i < last; ++i) {
      int b = static_cast<int>((prims[i].centroid[axis] - centroid_bounds.min[axis]) * scale);
      b = std::clamp(b, 0, kBins - 1);
      bin_bounds[b].extend(prims[i].bounds);
      ++bin_count[b];
    }
    Aabb right_acc[kBins];
    Aabb acc;
    for (int b = kBins - 1; b > 0; --b) {
      acc.extend(bin_bounds[b]);
      right_acc[b] = acc;
    }
    Aabb left = bin_bounds[0];
    int left_count = bin_count[0];
    for (int split = 1; split < kBins; ++split) {
      const int right_count = count - left_count;
      if (left_count > 0 && right_count > 0) {
        const Real cost = left.surface_area() * Real(left_count) +
                          right_acc[split].surface_area() * Real(right_count);
        if (cost < best_cost) {
          best_cost = cost;
          best_axis = axis;
          best_bin = split;
        }
      }
      left.extend(bin_bounds[split]);
      left_count += bin_count[split];
    }
  }

  int mid;
  if (best_axis >= 0) {
    const Real scale = Real(kBins) / cext[best_axis];
    const Real cmin = centroid_bounds.min[best_axis];
    auto it = std::partition(prims.begin() + first, prims.begin() + last,
                             [&](const BuildPrim& p) {
                               int b = static_cast<int>((p.centroid[best_axis] - cmin) * scale);
                               return std::clamp(b, 0, kBins - 1) < best_bin;
                             });
    mid = static_cast<int>(it - prims.begin());
  } else {
    mid = first;  // force the median fallback below
  }

  if (mid == first || mid == last) {
    // Degenerate centroids or an empty-sided bin split: median split on the
    // widest centroid axis.
    int axis = 0;
    cext.maxCoeff(&axis);
    mid = first + count / 2;
    std::nth_element(prims.begin() + first, prims.begin() + mid, prims.begin() + last,
                     [axis](const BuildPrim& a, const BuildPrim& b) {
                       return a.centroid[axis] < b.centroid[axis];
                     });
  }

  const int left_child = build_node(nodes, prims, first, mid);
  const int right_child = build_node(nodes, prims, mid, last);
  nodes[node_index].left = left_child;
  nodes[node_index].right = right_child;
  return node_index;
}

// Interval test for traversal; unlike ray_aabb_intersect it only needs the
// entry parameter.
inline bool hit_interval(const Aabb& box, const Vec3& origin, const Vec3& inv_dir,
                         Real t_min, Real t_max, Real& enter) {
  Real t0 = t_min, t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    if (std::isinf(inv_dir[a])) {
      if (origin[a] < box.min[a] || origin[a] > box.max[a]) return false;
      continue;
    }
    Real ta = (box.min[a] - origin[a]) * inv_dir[a];
    Real tb = (box.max[a] - origin[a]) * inv_dir[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = ta > t0 ? ta : t0;
    t1 = tb < t1 ? tb : t1;
    if (t0 > t1) return false;
  }
  enter = t0;
  return true;
}

inline Vec3 safe_inverse(const Vec3& d) {
  return Vec3(Real(1) / d.x(), Real(1) / d.y(), Real(1) / d.z());
}

}  // namespace

Bvh build_bvh(const std::vector<Aabb>& boxes) {
  if (boxes.empty()) throw std::invalid_argument("build_bvh: empty primitive list");
  std::vector<BuildPrim> prims(boxes.size());
  for (size_t i = 0; i < boxes.size(); ++i)
    prims[i] = BuildPrim{boxes[i], boxes[i].center(), static_cast<int>(i)};

  Bvh bvh;
  bvh.nodes.reserve(boxes.size() * 2);
  build_node(bvh.nodes, prims, 0, static_cast<int>(prims.size()));
  bvh.prim_order.resize(prims.size());
  for (size_t i = 0; i < prims.size(); ++i) bvh.prim_order[i] = prims[i].index;
  return bvh;
}

std::optional<TriangleHit> intersect_triangle(const Ray& ray, const Vec3& a,
                                              const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = ray.direction.cross(e2);
  const Real det = e1.dot(p);
  if (std::abs(det) < Real(1e-9)) return std::nullopt;
  const Real inv_det = Real(1) / det;
  const Vec3 s = ray.origin - a;
  const Real u = s.dot(p) * inv_det;
  if (u < Real(0) || u > Real(1)) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const Real v = ray.direction.dot(q) * inv_det;
  if (v < Real(0) || u + v > Real(1)) return std::nullopt;
  const Real t = e2.dot(q) * inv_det;
  if (t < ray.t_min || t > ray.t_max) return std::nullopt;
  return TriangleHit{t, u, v, -1};
}

std::optional<TriangleHit> intersect_closest(const Bvh& bvh, const Mesh& mesh,
                                             const Ray& ray) {
  if (bvh.empty()) return std::nullopt;
  const Vec3 inv_dir = safe_inverse(ray.direction);
  TriangleHit best;
  best.t = ray.t_max;
  bool found = false;

  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const BvhNode& node = bvh.nodes[stack[--top]];
    Real enter;
    if (!hit_interval(node.bounds, ray.origin, inv_dir, ray.t_min, best.t, enter))
      continue;
    if (node.leaf()) {
      for (int i = 0; i < node.count; ++i) {
        const int face = bvh.prim_order[node.first + i];
        const Vec3i& f = mesh.faces[face];
        auto hit = intersect_triangle(ray, mesh.vertices[f[0]], mesh.vertices[f[1]],
                                      mesh.vertices[f[2]]);
        if (!hit) continue;
        if (hit->t < best.t || (hit->t == best.t && (!found || face < best.face))) {
          best = *hit;
          best.face = face;
          found = true;
        }
      }
    } else {
      // Near child first so the shrinking best.t prunes the far side.
      Real enter_l = 0, enter_r = 0;
      const bool hl = hit_interval(bvh.nodes[node.left].bounds, ray.origin, inv_dir,
                                   ray.t_min, best.t, enter_l);
      const bool hr = hit_interval(bvh.nodes[node.right].bounds, ray.origin, inv_dir,
                                   ray.t_min, best.t, enter_r);
      if (hl && hr) {
        if (enter_l <= enter_r) {
          stack[top++] = node.right;
          stack[top++] = node.left;
        } else {
          stack[top++] = node.left;
          stack[top++] = node.right;
        }
      } else if (hl) {
        stack[top++] = node.left;
      } else if (hr) {
        stack[top++] = node.right;
      }
    }
  }
  if (!found) return std::nullopt;
  return best;
}

bool intersect_any(const Bvh& bvh, const Mesh& mesh, const Ray& ray) {
  if (bvh.empty()) return false;
  const Vec3 inv_dir = safe_inverse(ray.direction);
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const BvhNode& node = bvh.nodes[stack[--top]];
    Real enter;
    if (!hit_interval(node.bounds, ray.origin, inv_dir, ray.t_min, ray.t_max, enter))
      continue;
    if (node.leaf()) {
      for (int i = 0; i < node.count; ++i) {
        const int face = bvh.prim_order[node.first + i];
        const Vec3i& f = mesh.faces[face];
        if (intersect_triangle(ray, mesh.vertices[f[0]], mesh.vertices[f[1]],
                               mesh.vertices[f[2]]))
          return true;
      }
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return false;
}

void for_each_candidate(const Bvh& bvh, const Ray& ray,
                        const std::function<void(int)>& fn) {
  if (bvh.empty()) return;
  const Vec3 inv_dir = safe_inverse(ray.direction);
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const BvhNode& node = bvh.nodes[stack[--top]];
    Real enter;
    if (!hit_interval(node.bounds, ray.origin, inv_dir, ray.t_min, ray.t_max, enter))
      continue;
    if (node.leaf()) {
      for (int i = 0; i < node.count; ++i) fn(bvh.prim_order[node.first + i]);
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
}

HitRecord make_hit_record(const Mesh& mesh, const Ray& ray, const TriangleHit& hit,
                          int object_index) {
  HitRecord rec;
  rec.t = hit.t;
  rec.position = ray.at(hit.t);
  rec.shading_normal = mesh.shading_normal(hit.face, hit.u, hit.v);
  if (rec.shading_normal.dot(ray.direction) > Real(0))
    rec.shading_normal = -rec.shading_normal;
  rec.material_index = mesh.face_material[hit.face];
  rec.albedo = mesh.materials[rec.material_index].albedo;
  rec.object_index = object_index;
  rec.primitive_index = hit.face;
  return rec;
}

namespace {

bool check_node(const Bvh& bvh, int index, const std::vector<Aabb>& boxes,
                std::vector<int>& seen) {
  const BvhNode& node = bvh.nodes[index];
  if (node.leaf()) {
    for (int i = 0; i < node.count; ++i) {
      const int prim = bvh.prim_order[node.first + i];
      ++seen[prim];
      const Aabb& b = boxes[prim];
      if (!(node.bounds.min.array() <= b.min.array() + Real(1e-6)).all()) return false;
      if (!(node.bounds.max.array() >= b.max.array() - Real(1e-6)).all()) return false;
    }
    return true;
  }
  for (int child : {node.left, node.right}) {
    const Aabb& cb = bvh.nodes[child].bounds;
    if (!(node.bounds.min.array() <= cb.min.array() + Real(1e-6)).all()) return false;
    if (!(node.bounds.max.array() >= cb.max.array() - Real(1e-6)).all()) return false;
    if (!check_node(bvh, child, boxes, seen)) return false;
  }
  return true;
}

}  // namespace

bool bvh_is_consistent(const Bvh& bvh, const std::vector<Aabb>& boxes) {
  if (bvh.empty() || bvh.prim_order.size() != boxes.size()) return false;
  std::vector<int> seen(boxes.size(), 0);
  if (!check_node(bvh, 0, boxes, seen)) return false;
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

}  // namespace lsnif
