#pragma once

#include "lsnif/bvh.hpp"
#include "lsnif/image.hpp"
#include "lsnif/model_io.hpp"
#include "lsnif/scene.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace lsnif {

struct RenderConfig {
  int width = 256;
  int height = 256;
  int spp = 16;
  int max_bounces = 4;
  std::uint64_t seed = 0;
  enum class PrimaryMode { bvh, lsnif };
  PrimaryMode primary = PrimaryMode::bvh;
  // Respawn offset for neural hits, relative to the object's world diagonal.
  Real neural_eps_scale = Real(1e-3);
  // Pair ordering is a throughput measure, not a semantic one; renders must
  // be identical either way.
  bool sort_pairs = true;
  int workers = 0;  // 0 = hardware concurrency
};

// Broad-phase output: one candidate (ray, LSNIF object) pair with the ray's
// parametric overlap of the object's local-frame AABB (object space, same t
// parameterization as the world ray).
struct RayLsnifPair {
  int ray_slot = 0;
  int object = 0;
  Real t_enter = 0;
  Real t_exit = 0;
};

// Decoded network output for one pair. The normal is in the model's local
// mesh space, normalized, or zero when the head emitted a zero vector.
struct NeuralHit {
  bool occluded = false;
  Real t_world = 0;
  Vec3 normal = Vec3::Zero();
  Vec3 albedo = Vec3::Zero();
  int material_index = 0;
};

// One batched forward over encoded inputs (columns of `inputs`), outputs in
// input order; intervals[i] reconstructs t_world from the local_t head.
std::vector<NeuralHit> infer_batch(const LsnifModel& model, const MatX<Real>& inputs,
                                   const std::vector<RayInterval>& intervals);

// Shading-ready hit merged from the triangle and neural paths.
struct SurfaceHit {
  Real t = 0;
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  // unit, world space, faces the incoming ray
  Vec3 albedo = Vec3::Zero();
  MaterialKind kind = MaterialKind::diffuse;
  Real roughness = Real(0.5);
  int object_index = -1;
  bool neural = false;
};

struct PreparedObject {
  Mesh mesh;
  Affine object_to_world = Affine::Identity();
  Affine world_to_object = Affine::Identity();
  Representation representation = Representation::triangles;
  Bvh mesh_bvh;      // object-space triangles
  Aabb frame_box;    // local-frame AABB in object space (matches the model's)
  Aabb world_bounds;
  Real world_diag = Real(1);
  std::shared_ptr<const LsnifModel> model;  // lsnif objects only
};

// Scene with acceleration structures and models resolved. Triangle BVHs are
// kept for every object: they serve primary visibility in bvh mode and the
// reference/oracle path.
class PreparedScene {
 public:
  static PreparedScene prepare(const Scene& scene);

  // Replaces the model of an lsnif object (e.g. with a freshly trained one).
  void set_model(int object_index, std::shared_ptr<const LsnifModel> model);

  const std::vector<PreparedObject>& objects() const { return objects_; }
  const std::vector<Light>& lights() const { return lights_; }
  const Camera& camera() const { return camera_; }
  const Vec3& environment() const { return environment_; }
  Real scene_diag() const { return scene_bounds_.diagonal(); }

  // Closest-hit over the two-level triangle BVH. `lsnif_as_triangles`
  // controls whether lsnif-represented objects contribute their meshes
  // (primary rays in bvh mode, reference renders).
  std::optional<SurfaceHit> intersect_triangles(const Ray& ray,
                                                bool lsnif_as_triangles) const;
  bool occluded_triangles(const Ray& ray, bool lsnif_as_triangles) const;

  // Broad phase: pairs whose object-space AABB interval starts before
  // max_t[slot] (ascending object order after sorting).
  std::vector<RayLsnifPair> collect_pairs(const std::vector<Ray>& rays,
                                          const std::vector<Real>& max_t,
                                          bool sorted) const;

  // Full pipeline over a ray batch: triangle phase, broad phase, narrow
  // phase with one batched inference per object group; per-ray winner by t.
  std::vector<std::optional<SurfaceHit>> intersect_scene(
      const std::vector<Ray>& rays, bool use_lsnif, bool sort_pairs = true) const;

  // Batched shadow query; a ray is occluded when a triangle blocks it or a
  // consulted model reports a hit before the ray's t_max.
  std::vector<char> occluded_batch(const std::vector<Ray>& rays,
                                   bool use_lsnif) const;

  bool has_lsnif_objects() const { return !lsnif_objects_.empty(); }

 private:
  std::vector<PreparedObject> objects_;
  std::vector<Light> lights_;
  Camera camera_;
  Vec3 environment_ = Vec3::Zero();
  Aabb scene_bounds_;
  Bvh top_all_;
  Bvh top_tri_;
  Bvh top_lsnif_;
  std::vector<int> tri_objects_;
  std::vector<int> lsnif_objects_;
};

// Unidirectional path tracer with next-event estimation for point and sphere
// lights; the constant environment contributes on ray miss. Deterministic
// for a fixed seed regardless of worker count.
Image render(const PreparedScene& scene, const RenderConfig& config);

// Plain two-level-BVH path tracer sharing the shading code but none of the
// wavefront/broad/narrow machinery. With zero lsnif objects, render() must
// match this bitwise for the same seed.
Image render_reference(const PreparedScene& scene, const RenderConfig& config);

}  // namespace lsnif
