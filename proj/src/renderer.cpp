#include "lsnif/renderer.hpp"

#include "lsnif/dda.hpp"
#include "lsnif/parallel.hpp"
#include "lsnif/sampling.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace lsnif {
namespace {

constexpr Real kInf = std::numeric_limits<Real>::infinity();
constexpr Real kTriangleEpsScale = Real(1e-4);  // respawn offset for mesh hits

std::vector<Aabb> triangle_boxes(const Mesh& mesh) {
  std::vector<Aabb> boxes(mesh.n_faces());
  for (int f = 0; f < mesh.n_faces(); ++f) {
    Aabb b;
    for (int k = 0; k < 3; ++k) b.extend(mesh.vertices[mesh.faces[f][k]]);
    boxes[f] = b;
  }
  return boxes;
}

Ray object_space_ray(const PreparedObject& obj, const Ray& world_ray, Real t_max) {
  Ray oray;
  oray.origin = obj.world_to_object * world_ray.origin;
  oray.direction = obj.world_to_object.linear() * world_ray.direction;
  oray.t_min = world_ray.t_min;
  oray.t_max = t_max;
  return oray;
}

Vec3 normal_to_world(const PreparedObject& obj, const Vec3& n_object) {
  return (obj.world_to_object.linear().transpose() * n_object).normalized();
}

}  // namespace

PreparedScene PreparedScene::prepare(const Scene& scene) {
  PreparedScene out;
  out.camera_ = scene.camera;
  for (const Light& light : scene.lights) {
    if (light.type == LightType::environment)
      out.environment_ += light.radiance;
    else
      out.lights_.push_back(light);
  }

  std::map<std::string, std::shared_ptr<const LsnifModel>> model_cache;
  for (const SceneObject& so : scene.objects) {
    PreparedObject obj;
    obj.mesh = scene.meshes[so.mesh_index];
    obj.object_to_world = so.object_to_world;
    obj.world_to_object = so.object_to_world.inverse();
    obj.representation = so.representation;
    obj.mesh_bvh = build_bvh(triangle_boxes(obj.mesh));
    // The frame box must match what training derives from the mesh so the
    // broad phase and the model agree; a loaded model is authoritative.
    obj.frame_box = LocalFrame::for_mesh(obj.mesh).aabb;
    if (so.representation == Representation::lsnif && !so.model_path.empty()) {
      auto it = model_cache.find(so.model_path);
      if (it == model_cache.end()) {
        it = model_cache
                 .emplace(so.model_path,
                          std::make_shared<const LsnifModel>(load_model(so.model_path)))
                 .first;
      }
      obj.model = it->second;
      obj.frame_box = obj.model->aabb;
    }
    obj.world_bounds = transform_aabb(obj.object_to_world, obj.mesh.bounds());
    obj.world_diag = obj.world_bounds.diagonal();
    out.scene_bounds_.extend(obj.world_bounds);
    out.objects_.push_back(std::move(obj));
  }

  std::vector<Aabb> all_boxes, tri_boxes, lsnif_boxes;
  for (size_t i = 0; i < out.objects_.size(); ++i) {
    const PreparedObject& obj = out.objects_[i];
    all_boxes.push_back(obj.world_bounds);
    if (obj.representation == Representation::lsnif) {
      out.lsnif_objects_.push_back(static_cast<int>(i));
      lsnif_boxes.push_back(transform_aabb(obj.object_to_world, obj.frame_box));
    } else {
      out.tri_objects_.push_back(static_cast<int>(i));
      tri_boxes.push_back(obj.world_bounds);
    }
  }
  if (!all_boxes.empty()) out.top_all_ = build_bvh(all_boxes);
  if (!tri_boxes.empty()) out.top_tri_ = build_bvh(tri_boxes);
  if (!lsnif_boxes.empty()) out.top_lsnif_ = build_bvh(lsnif_boxes);
  return out;
}

void PreparedScene::set_model(int object_index, std::shared_ptr<const LsnifModel> model) {
  PreparedObject& obj = objects_.at(static_cast<size_t>(object_index));
  if (obj.representation != Representation::lsnif)
    throw std::invalid_argument("set_model on a triangle-represented object");
  obj.model = std::move(model);
  obj.frame_box = obj.model->aabb;
}

std::optional<SurfaceHit> PreparedScene::intersect_triangles(
    const Ray& ray, bool lsnif_as_triangles) const {
  const Bvh& top = lsnif_as_triangles ? top_all_ : top_tri_;
  const std::vector<int>* map = lsnif_as_triangles ? nullptr : &tri_objects_;

  std::optional<SurfaceHit> best;
  Real best_t = ray.t_max;
  for_each_candidate(top, ray, [&](int prim) {
    const int object_index = map ? (*map)[prim] : prim;
    const PreparedObject& obj = objects_[object_index];
    const Ray oray = object_space_ray(obj, ray, best_t);
    const auto hit = intersect_closest(obj.mesh_bvh, obj.mesh, oray);
    if (!hit || hit->t >= best_t) return;
    SurfaceHit sh;
    sh.t = hit->t;
    sh.position = ray.at(hit->t);
    Vec3 n = normal_to_world(obj, obj.mesh.shading_normal(hit->face, hit->u, hit->v));
    if (n.dot(ray.direction) > Real(0)) n = -n;
    sh.normal = n;
    const Material& mat = obj.mesh.materials[obj.mesh.face_material[hit->face]];
    sh.albedo = mat.albedo;
    sh.kind = mat.kind;
    sh.roughness = mat.roughness;
    sh.object_index = object_index;
    sh.neural = false;
    best = sh;
    best_t = hit->t;
  });
  return best;
}

bool PreparedScene::occluded_triangles(const Ray& ray, bool lsnif_as_triangles) const {
  const Bvh& top = lsnif_as_triangles ? top_all_ : top_tri_;
  const std::vector<int>* map = lsnif_as_triangles ? nullptr : &tri_objects_;
  bool blocked = false;
  for_each_candidate(top, ray, [&](int prim) {
    if (blocked) return;
    const int object_index = map ? (*map)[prim] : prim;
    const PreparedObject& obj = objects_[object_index];
    const Ray oray = object_space_ray(obj, ray, ray.t_max);
    if (intersect_any(obj.mesh_bvh, obj.mesh, oray)) blocked = true;
  });
  return blocked;
}

std::vector<RayLsnifPair> PreparedScene::collect_pairs(const std::vector<Ray>& rays,
                                                       const std::vector<Real>& max_t,
                                                       bool sorted) const {
  std::vector<RayLsnifPair> pairs;
  if (top_lsnif_.empty()) return pairs;
  for (size_t slot = 0; slot < rays.size(); ++slot) {
    Ray probe = rays[slot];
    probe.t_max = max_t[slot];
    for_each_candidate(top_lsnif_, probe, [&](int prim) {
      const int object_index = lsnif_objects_[prim];
      const PreparedObject& obj = objects_[object_index];
      // The interval spans the whole local-frame box (t_max unclipped) so the
      // encoding matches the training distribution; the clip against the
      // current best t only gates pair emission.
      Ray oray = object_space_ray(obj, rays[slot], kInf);
      const auto interval = ray_aabb_intersect(oray, obj.frame_box);
      if (!interval || interval->enter >= max_t[slot]) return;
      pairs.push_back(RayLsnifPair{static_cast<int>(slot), object_index,
                                   interval->enter, interval->exit});
    });
  }
  if (sorted)
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const RayLsnifPair& a, const RayLsnifPair& b) {
                       return a.object < b.object;
                     });
  return pairs;
}

std::vector<NeuralHit> infer_batch(const LsnifModel& model, const MatX<Real>& inputs,
                                   const std::vector<RayInterval>& intervals) {
  if (inputs.cols() != static_cast<Eigen::Index>(intervals.size()))
    throw std::invalid_argument("infer_batch: inputs/intervals size mismatch");
  const MlpParams& mlp = model.mlp;
  if (inputs.rows() != mlp.input_width())
    throw std::invalid_argument("infer_batch: input width mismatch");
  const int n_mat = mlp.n_mat();

  std::vector<NeuralHit> hits(static_cast<size_t>(inputs.cols()));
  // Column-at-a-time evaluation: each output depends only on its own input,
  // so results are identical however the pairs were grouped or sorted.
  VecX<Real> z1(mlp.hidden_width()), z2(mlp.hidden_width()), z3(mlp.output_width());
  MatX<Real> z3m(mlp.output_width(), 1), pm;
  for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
    z1.noalias() = mlp.w1 * inputs.col(j);
    z1 += mlp.b1;
    for (Eigen::Index i = 0; i < z1.size(); ++i)
      if (z1[i] < Real(0)) z1[i] *= kLeakySlope;
    z2.noalias() = mlp.w2 * z1;
    z2 += mlp.b2;
    for (Eigen::Index i = 0; i < z2.size(); ++i)
      if (z2[i] < Real(0)) z2[i] *= kLeakySlope;
    z3.noalias() = mlp.w3 * z2;
    z3 += mlp.b3;
    z3m.col(0) = z3;
    apply_heads(z3m, pm);

    NeuralHit& nh = hits[static_cast<size_t>(j)];
    nh.occluded = pm(kHeadOcclusion, 0) > Real(0.5);
    const Real local_t = pm(kHeadLocalT, 0);
    nh.t_world = intervals[static_cast<size_t>(j)].enter +
                 local_t * (intervals[static_cast<size_t>(j)].exit -
                            intervals[static_cast<size_t>(j)].enter);
    Vec3 n = pm.block<3, 1>(kHeadNormal, 0);
    const Real len = n.norm();
    nh.normal = len > Real(1e-12) ? Vec3(n / len) : Vec3::Zero();
    nh.albedo = pm.block<3, 1>(kHeadAlbedo, 0);
    int arg = 0;
    pm.col(0).segment(kHeadMaterial, n_mat).maxCoeff(&arg);
    nh.material_index = arg;
  }
  return hits;
}

namespace {

// Shared narrow phase: encode each pair, one batched inference per object
// group, hand each (pair, hit) to `accept`.
template <typename AcceptFn>
void run_narrow_phase(const PreparedScene& scene, const std::vector<Ray>& rays,
                      const std::vector<RayLsnifPair>& pairs, AcceptFn&& accept) {
  const auto& objects = scene.objects();
  size_t i = 0;
  BoundaryHits hits;
  while (i < pairs.size()) {
    size_t j = i;
    while (j < pairs.size() && pairs[j].object == pairs[i].object) ++j;
    const PreparedObject& obj = objects[pairs[i].object];
    const LsnifModel& model = *obj.model;
    const LocalFrame frame = model.frame();
    const int n = static_cast<int>(j - i);

    MatX<Real> inputs(model.input_width(), n);
    std::vector<RayInterval> intervals(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      const RayLsnifPair& pair = pairs[i + k];
      const Ray& ray = rays[pair.ray_slot];
      const Ray oray = object_space_ray(obj, ray, kInf);
      collect_boundary_hits_local(frame.to_local(oray.origin),
                                  oray.direction.cwiseProduct(frame.inv_extent),
                                  oray.t_min, kInf, model.occupancy, model.hit_cap,
                                  hits);
      int point_count = 0;
      encode_ray_into<Real>(model.grid, hits, model.hit_cap, inputs.col(k).data(),
                            nullptr, point_count);
      intervals[static_cast<size_t>(k)] = RayInterval{pair.t_enter, pair.t_exit};
    }
    const std::vector<NeuralHit> neural = infer_batch(model, inputs, intervals);
    for (int k = 0; k < n; ++k) accept(pairs[i + k], neural[static_cast<size_t>(k)]);
    i = j;
  }
}

}  // namespace

std::vector<std::optional<SurfaceHit>> PreparedScene::intersect_scene(
    const std::vector<Ray>& rays, bool use_lsnif, bool sort_pairs) const {
  std::vector<std::optional<SurfaceHit>> results(rays.size());
  std::vector<Real> best_t(rays.size());
  for (size_t i = 0; i < rays.size(); ++i) {
    results[i] = intersect_triangles(rays[i], /*lsnif_as_triangles=*/!use_lsnif);
    best_t[i] = results[i] ? results[i]->t : rays[i].t_max;
  }
  if (!use_lsnif || top_lsnif_.empty()) return results;

  const std::vector<RayLsnifPair> pairs = collect_pairs(rays, best_t, sort_pairs);
  run_narrow_phase(*this, rays, pairs, [&](const RayLsnifPair& pair, const NeuralHit& nh) {
    if (!nh.occluded) return;
    assert(nh.t_world >= pair.t_enter && nh.t_world <= pair.t_exit);
    const Ray& ray = rays[pair.ray_slot];
    if (nh.t_world >= best_t[pair.ray_slot] || nh.t_world < ray.t_min) return;
    const PreparedObject& obj = objects_[pair.object];
    SurfaceHit sh;
    sh.t = nh.t_world;
    sh.position = ray.at(nh.t_world);
    Vec3 n = nh.normal.squaredNorm() == Real(0) ? Vec3(-ray.direction)
                                                : normal_to_world(obj, nh.normal);
    if (n.dot(ray.direction) > Real(0)) n = -n;
    sh.normal = n;
    sh.albedo = nh.albedo;  // the table supplies the BSDF kind, the head the color
    const int mat = std::clamp(nh.material_index, 0, obj.model->n_mat() - 1);
    sh.kind = obj.model->materials[static_cast<size_t>(mat)].kind;
    sh.roughness = obj.model->materials[static_cast<size_t>(mat)].roughness;
    sh.object_index = pair.object;
    sh.neural = true;
    results[pair.ray_slot] = sh;
    best_t[pair.ray_slot] = nh.t_world;
  });
  return results;
}

std::vector<char> PreparedScene::occluded_batch(const std::vector<Ray>& rays,
                                                bool use_lsnif) const {
  std::vector<char> occluded(rays.size(), 0);
  for (size_t i = 0; i < rays.size(); ++i)
    occluded[i] = occluded_triangles(rays[i], /*lsnif_as_triangles=*/!use_lsnif) ? 1 : 0;
  if (!use_lsnif || top_lsnif_.empty()) return occluded;

  std::vector<Real> max_t(rays.size());
  for (size_t i = 0; i < rays.size(); ++i)
    max_t[i] = occluded[i] ? rays[i].t_min : rays[i].t_max;  // skip settled rays
  const std::vector<RayLsnifPair> pairs = collect_pairs(rays, max_t, true);
  run_narrow_phase(*this, rays, pairs, [&](const RayLsnifPair& pair, const NeuralHit& nh) {
    if (!nh.occluded) return;
    const Ray& ray = rays[pair.ray_slot];
    if (nh.t_world >= ray.t_min && nh.t_world <= ray.t_max)
      occluded[pair.ray_slot] = 1;
  });
  return occluded;
}

// ---------------------------------------------------------------------------
// Path tracing

namespace {

struct CameraBasis {
  Vec3 origin, forward, right, up;
  Real half_w, half_h;
};

CameraBasis make_camera_basis(const Camera& cam, int width, int height) {
  CameraBasis b;
  b.origin = cam.position;
  b.forward = (cam.look_at - cam.position).normalized();
  b.right = b.forward.cross(cam.up).normalized();
  b.up = b.right.cross(b.forward);
  b.half_h = std::tan(Real(0.5) * cam.vfov_deg * Real(M_PI / 180.0));
  b.half_w = b.half_h * static_cast<Real>(width) / static_cast<Real>(height);
  return b;
}

Ray camera_ray(const CameraBasis& basis, int px, int py, int width, int height,
               Rng& rng) {
  const Real u = uniform_real(rng);
  const Real v = uniform_real(rng);
  const Real sx = Real(2) * (static_cast<Real>(px) + u) / static_cast<Real>(width) - Real(1);
  const Real sy = Real(1) - Real(2) * (static_cast<Real>(py) + v) / static_cast<Real>(height);
  Ray ray;
  ray.origin = basis.origin;
  ray.direction =
      (basis.forward + sx * basis.half_w * basis.right + sy * basis.half_h * basis.up)
          .normalized();
  ray.t_min = Real(0);
  ray.t_max = kInf;
  return ray;
}

struct ShadowItem {
  Ray ray;
  Vec3 contribution = Vec3::Zero();
};

struct ShadeOutcome {
  ShadowItem shadows[8];
  int n_shadows = 0;
  bool continue_path = false;
  Ray next_ray;
  Vec3 next_throughput = Vec3::Zero();
};

// One shading event shared by the wavefront and reference paths. RNG draws
// happen in a fixed order (per light, then the BSDF sample) so both paths
// consume identical streams.
void shade_hit(const PreparedScene& scene, const RenderConfig& cfg, const Ray& ray,
               const SurfaceHit& hit, const Vec3& throughput, bool spawn, Rng& rng,
               ShadeOutcome& out) {
  out.n_shadows = 0;
  out.continue_path = false;

  const PreparedObject& obj = scene.objects()[hit.object_index];
  const Real eps =
      (hit.neural ? cfg.neural_eps_scale : kTriangleEpsScale) * obj.world_diag;
  const Vec3 spawn_origin = hit.position + eps * hit.normal;

  if (hit.kind == MaterialKind::diffuse) {
    for (const Light& light : scene.lights()) {
      Vec3 target = light.position;
      Vec3 light_normal = Vec3::Zero();
      Real pdf_area = Real(1);
      if (light.type == LightType::sphere) {
        light_normal = uniform_sphere_dir(rng);
        target = light.position + light.radius * light_normal;
        pdf_area = Real(1) / (Real(4) * Real(M_PI) * light.radius * light.radius);
      }
      const Vec3 to_light = target - spawn_origin;
      const Real dist2 = to_light.squaredNorm();
      if (dist2 <= Real(0)) continue;
      const Real dist = std::sqrt(dist2);
      const Vec3 wi = to_light / dist;
      const Real cos_surf = hit.normal.dot(wi);
      if (cos_surf <= Real(0)) continue;

      Vec3 contribution;
      if (light.type == LightType::sphere) {
        const Real cos_light = light_normal.dot(-wi);
        if (cos_light <= Real(0)) continue;
        contribution = throughput.cwiseProduct(hit.albedo) * Real(M_1_PI) * cos_surf *
                       cos_light / (dist2 * pdf_area);
      } else {
        contribution =
            throughput.cwiseProduct(hit.albedo) * Real(M_1_PI) * cos_surf / dist2;
      }
      contribution = contribution.cwiseProduct(light.radiance);
      if ((contribution.array() <= Real(0)).all()) continue;
      if (out.n_shadows >= 8) continue;

      ShadowItem& item = out.shadows[out.n_shadows++];
      item.ray.origin = spawn_origin;
      item.ray.direction = wi;
      item.ray.t_min = Real(0);
      item.ray.t_max = dist * Real(1 - 1e-4);
      item.contribution = contribution;
    }
  }

  if (!spawn) return;

  Vec3 dir;
  if (hit.kind == MaterialKind::diffuse) {
    dir = cosine_hemisphere_dir(hit.normal, rng);
  } else {
    // Phong lobe around the mirror direction; paths leaving below the
    // surface are absorbed.
    const Vec3 refl =
        (ray.direction - Real(2) * ray.direction.dot(hit.normal) * hit.normal)
            .normalized();
    const Real exponent =
        std::max(Real(0), Real(2) / (hit.roughness * hit.roughness) - Real(2));
    const Real u1 = uniform_real(rng);
    const Real u2 = uniform_real(rng);
    const Real cos_alpha = std::pow(u1, Real(1) / (exponent + Real(1)));
    const Real sin_alpha = std::sqrt(std::max(Real(0), Real(1) - cos_alpha * cos_alpha));
    const Real phi = Real(2) * Real(M_PI) * u2;
    Vec3 t, b;
    orthonormal_basis(refl, t, b);
    dir = (sin_alpha * std::cos(phi) * t + sin_alpha * std::sin(phi) * b +
           cos_alpha * refl)
              .normalized();
    if (dir.dot(hit.normal) <= Real(0)) return;
  }

  out.continue_path = true;
  out.next_ray.origin = spawn_origin;
  out.next_ray.direction = dir;
  out.next_ray.t_min = Real(0);
  out.next_ray.t_max = kInf;
  out.next_throughput = throughput.cwiseProduct(hit.albedo);
}

struct PathState {
  Rng rng;
  Ray ray;
  Vec3 throughput = Vec3::Ones();
  Vec3 radiance = Vec3::Zero();
  int pixel = 0;
  bool active = true;
};

}  // namespace

Image render(const PreparedScene& scene, const RenderConfig& config) {
  Image image(config.width, config.height);
  const CameraBasis basis = make_camera_basis(scene.camera(), config.width, config.height);
  // Bound the in-flight path count per block to keep memory flat.
  const int rows_per_block =
      std::max(1, 65536 / std::max(1, config.width * config.spp));

  const long n_blocks = (config.height + rows_per_block - 1) / rows_per_block;
  parallel_slices(n_blocks, config.workers, [&](int, long block_begin, long block_end) {
    std::vector<PathState> paths;
    std::vector<Ray> rays;
    std::vector<int> ray_owner;
    std::vector<Ray> shadow_rays;
    std::vector<Vec3> shadow_contrib;
    std::vector<int> shadow_owner;
    ShadeOutcome outcome;

    for (long block = block_begin; block < block_end; ++block) {
      const int y0 = static_cast<int>(block) * rows_per_block;
      const int y1 = std::min(config.height, y0 + rows_per_block);

      paths.clear();
      for (int y = y0; y < y1; ++y) {
        for (int x = 0; x < config.width; ++x) {
          const int pixel = y * config.width + x;
          for (int s = 0; s < config.spp; ++s) {
            PathState p;
            p.rng = Rng(seed_stream(config.seed, static_cast<std::uint64_t>(pixel), s));
            p.ray = camera_ray(basis, x, y, config.width, config.height, p.rng);
            p.pixel = pixel;
            paths.push_back(std::move(p));
          }
        }
      }

      for (int depth = 0; depth <= config.max_bounces; ++depth) {
        rays.clear();
        ray_owner.clear();
        for (size_t i = 0; i < paths.size(); ++i) {
          if (!paths[i].active) continue;
          rays.push_back(paths[i].ray);
          ray_owner.push_back(static_cast<int>(i));
        }
        if (rays.empty()) break;

        const bool use_lsnif =
            scene.has_lsnif_objects() &&
            (depth > 0 || config.primary == RenderConfig::PrimaryMode::lsnif);
        const auto hits = scene.intersect_scene(rays, use_lsnif, config.sort_pairs);

        shadow_rays.clear();
        shadow_contrib.clear();
        shadow_owner.clear();
        for (size_t k = 0; k < rays.size(); ++k) {
          PathState& path = paths[static_cast<size_t>(ray_owner[k])];
          if (!hits[k]) {
            path.radiance += path.throughput.cwiseProduct(scene.environment());
            path.active = false;
            continue;
          }
          shade_hit(scene, config, path.ray, *hits[k], path.throughput,
                    depth < config.max_bounces, path.rng, outcome);
          for (int s = 0; s < outcome.n_shadows; ++s) {
            shadow_rays.push_back(outcome.shadows[s].ray);
            shadow_contrib.push_back(outcome.shadows[s].contribution);
            shadow_owner.push_back(ray_owner[k]);
          }
          if (outcome.continue_path) {
            path.ray = outcome.next_ray;
            path.throughput = outcome.next_throughput;
          } else {
            path.active = false;
          }
        }

        if (!shadow_rays.empty()) {
          const auto blocked =
              scene.occluded_batch(shadow_rays, scene.has_lsnif_objects());
          for (size_t s = 0; s < shadow_rays.size(); ++s)
            if (!blocked[s])
              paths[static_cast<size_t>(shadow_owner[s])].radiance += shadow_contrib[s];
        }
      }

      for (const PathState& p : paths)
        image.pixels[static_cast<size_t>(p.pixel)] += p.radiance;
    }
  });

  const Real inv_spp = Real(1) / static_cast<Real>(config.spp);
  for (Vec3& p : image.pixels) p *= inv_spp;
  return image;
}

Image render_reference(const PreparedScene& scene, const RenderConfig& config) {
  Image image(config.width, config.height);
  const CameraBasis basis = make_camera_basis(scene.camera(), config.width, config.height);

  parallel_slices(config.height, config.workers, [&](int, long y0, long y1) {
    ShadeOutcome outcome;
    for (long y = y0; y < y1; ++y) {
      for (int x = 0; x < config.width; ++x) {
        const int pixel = static_cast<int>(y) * config.width + x;
        Vec3 accum = Vec3::Zero();
        for (int s = 0; s < config.spp; ++s) {
          Rng rng(seed_stream(config.seed, static_cast<std::uint64_t>(pixel), s));
          Ray ray = camera_ray(basis, x, static_cast<int>(y), config.width,
                               config.height, rng);
          Vec3 throughput = Vec3::Ones();
          for (int depth = 0; depth <= config.max_bounces; ++depth) {
            const auto hit = scene.intersect_triangles(ray, /*lsnif_as_triangles=*/true);
            if (!hit) {
              accum += throughput.cwiseProduct(scene.environment());
              break;
            }
            shade_hit(scene, config, ray, *hit, throughput,
                      depth < config.max_bounces, rng, outcome);
            for (int k = 0; k < outcome.n_shadows; ++k)
              if (!scene.occluded_triangles(outcome.shadows[k].ray, true))
                accum += outcome.shadows[k].contribution;
            if (!outcome.continue_path) break;
            ray = outcome.next_ray;
            throughput = outcome.next_throughput;
          }
        }
        image.pixels[static_cast<size_t>(pixel)] = accum / static_cast<Real>(config.spp);
      }
    }
  });
  return image;
}

}  // namespace lsnif
