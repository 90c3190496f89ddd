#include "lsnif/training.hpp"

#include "lsnif/parallel.hpp"
#include "lsnif/voxel.hpp"

#include <cmath>
#include <stdexcept>

namespace lsnif {
namespace {

constexpr int kSurfaceRetries = 64;
constexpr int kChunk = 1024;  // samples per encode/forward block

Real self_intersection_eps(const Aabb& aabb) {
  return Real(1e-4) * aabb.diagonal();
}

}  // namespace

Ray sample_external_ray(const Aabb& aabb, Rng& rng) {
  const Vec3 center = aabb.center();
  const Real radius = Real(0.5) * aabb.diagonal();
  Ray ray;
  ray.origin = center + radius * uniform_sphere_dir(rng);
  const Vec3 toward = (center - ray.origin).normalized();
  ray.direction = cosine_hemisphere_dir(toward, rng);
  ray.t_min = Real(0);
  return ray;
}

std::optional<Ray> sample_surface_ray(const Mesh& mesh, const Bvh& bvh,
                                      const LocalFrame& frame, Rng& rng) {
  const Ray probe = sample_external_ray(frame.aabb, rng);
  const auto hit = intersect_closest(bvh, mesh, probe);
  if (!hit) return std::nullopt;
  Vec3 normal = mesh.shading_normal(hit->face, hit->u, hit->v);
  if (normal.dot(probe.direction) > Real(0)) normal = -normal;
  Ray ray;
  ray.origin = probe.at(hit->t) + self_intersection_eps(frame.aabb) * normal;
  ray.direction = cosine_hemisphere_dir(normal, rng);
  ray.t_min = Real(0);
  return ray;
}

bool label_ray(TrainSample& sample, const Bvh& bvh, const Mesh& mesh,
               const LocalFrame& frame) {
  const auto interval = ray_aabb_intersect(sample.ray, frame.aabb);
  if (!interval) return false;
  const auto hit = intersect_closest(bvh, mesh, sample.ray);
  sample.target_occluded = hit.has_value() && hit->t <= interval->exit;
  if (sample.target_occluded) {
    const Real span = std::max(interval->exit - interval->enter, Real(1e-12));
    sample.target_local_t =
        std::clamp((hit->t - interval->enter) / span, Real(0), Real(1));
    Vec3 normal = mesh.shading_normal(hit->face, hit->u, hit->v);
    if (normal.dot(sample.ray.direction) > Real(0)) normal = -normal;
    sample.target_normal = normal;
    const int mat = mesh.face_material[hit->face];
    sample.target_material = mat;
    sample.target_albedo = mesh.materials[mat].albedo;
  } else {
    sample.target_local_t = Real(0);
    sample.target_normal = Vec3::UnitZ();
    sample.target_albedo = Vec3::Zero();
    sample.target_material = 0;
  }
  return true;
}

TrainSample draw_sample(bool external, const Mesh& mesh, const Bvh& bvh,
                        const LocalFrame& frame, const OccupancyGrid& occupancy,
                        int hit_cap, Rng& rng) {
  TrainSample sample;
  if (!external) {
    for (int attempt = 0; attempt < kSurfaceRetries; ++attempt) {
      auto ray = sample_surface_ray(mesh, bvh, frame, rng);
      if (!ray) continue;
      sample.ray = *ray;
      if (label_ray(sample, bvh, mesh, frame)) {
        collect_boundary_hits(sample.ray, frame, occupancy, hit_cap, sample.hits);
        return sample;
      }
    }
    // Degenerate meshes can starve the surface quota; fall back to external.
  }
  while (true) {
    sample.ray = sample_external_ray(frame.aabb, rng);
    if (label_ray(sample, bvh, mesh, frame)) break;
  }
  collect_boundary_hits(sample.ray, frame, occupancy, hit_cap, sample.hits);
  return sample;
}

LsnifModel train(const Mesh& mesh, const TrainConfig& config) {
  if (config.steps < 1 || config.batch < 1)
    throw std::invalid_argument("train: steps and batch must be >= 1");
  mesh.validate();

  const LocalFrame frame = LocalFrame::for_mesh(mesh);
  const OccupancyGrid occupancy = voxelize_surface(mesh, frame, config.voxel_res);

  std::vector<Aabb> tri_boxes(mesh.n_faces());
  for (int f = 0; f < mesh.n_faces(); ++f) {
    Aabb b;
    for (int k = 0; k < 3; ++k) b.extend(mesh.vertices[mesh.faces[f][k]]);
    tri_boxes[f] = b;
  }
  const Bvh bvh = build_bvh(tri_boxes);

  LsnifModel model;
  model.voxel_res = config.voxel_res;
  model.hit_cap = config.hit_cap;
  model.occupancy = occupancy;
  model.grid = make_sparse_hash_grid<Real>(config.voxel_res, config.level_res,
                                           config.f_dim, config.table_size,
                                           config.seed);
  const int n_levels = model.grid.n_levels();
  const int lf = n_levels * config.f_dim;
  const int input_width = config.hit_cap * lf;
  model.mlp = make_mlp<Real>(input_width, config.hidden_width,
                             mesh.n_materials(), config.seed);
  model.materials = mesh.materials;
  model.aabb = frame.aabb;

  const int workers = resolve_workers(config.workers);
  const AdamConfig adam{config.lr, Real(0.9), Real(0.999), Real(1e-8)};
  AdamState mlp_state;
  std::vector<AdamStateT<Real>> grid_states(n_levels);
  for (int l = 0; l < n_levels; ++l) {
    grid_states[l].m = {MatX<Real>::Zero(config.f_dim, config.table_size)};
    grid_states[l].v = {MatX<Real>::Zero(config.f_dim, config.table_size)};
  }

  struct WorkerScratch {
    MlpGrads grads;
    std::vector<MatX<Real>> level_grads;
    LossTerms loss;
    MlpCache cache;
    MatX<Real> dp;
    MatX<Real> dx;
    std::vector<PointCode> codes;
    std::vector<int> point_counts;
  };
  std::vector<WorkerScratch> scratch(workers);
  for (auto& s : scratch) {
    s.grads = MlpGrads::zeros_like(model.mlp);
    s.level_grads.assign(n_levels, MatX<Real>::Zero(config.f_dim, config.table_size));
  }

  const Real inv_batch = Real(1) / static_cast<Real>(config.batch);

  for (int step = 0; step < config.steps; ++step) {
    parallel_slices(config.batch, workers, [&](int w, long begin, long end) {
      WorkerScratch& s = scratch[w];
      Rng rng(seed_stream(config.seed, static_cast<std::uint64_t>(step), w, 0x7e1));
      std::bernoulli_distribution pick_external(config.external_mix);

      for (long base = begin; base < end; base += kChunk) {
        const int n = static_cast<int>(std::min<long>(kChunk, end - base));
        s.cache.x.setZero(input_width, n);
        s.codes.resize(static_cast<size_t>(n) * config.hit_cap * n_levels);
        s.point_counts.assign(n, 0);
        std::vector<TargetT<Real>> targets(n);

        for (int j = 0; j < n; ++j) {
          const TrainSample sample = draw_sample(pick_external(rng), mesh, bvh, frame,
                                                 occupancy, config.hit_cap, rng);
          encode_ray_into(model.grid, sample.hits, config.hit_cap,
                          s.cache.x.col(j).data(),
                          s.codes.data() + static_cast<size_t>(j) * config.hit_cap * n_levels,
                          s.point_counts[j]);
          targets[j] = TargetT<Real>{sample.target_occluded, sample.target_local_t,
                                     sample.target_normal, sample.target_albedo,
                                     sample.target_material};
        }

        forward_cached(model.mlp, s.cache);
        s.dp.setZero(model.mlp.output_width(), n);
        for (int j = 0; j < n; ++j) {
          VecX<Real> dp_col;
          LossTerms terms = composite_loss<Real>(s.cache.p.col(j), targets[j], &dp_col);
          terms.scale(inv_batch);
          s.loss.add(terms);
          s.dp.col(j) = dp_col * inv_batch;
        }

        backward(model.mlp, s.cache, s.dp, s.grads, &s.dx);
        for (int j = 0; j < n; ++j)
          accumulate_grad_into(s.level_grads, config.f_dim,
                               s.codes.data() + static_cast<size_t>(j) * config.hit_cap * n_levels,
                               s.point_counts[j], s.dx.col(j).data());
      }
    });

    // Worker-ordered reduction keeps a fixed worker count bit-reproducible.
    MlpGrads total = MlpGrads::zeros_like(model.mlp);
    std::vector<MatX<Real>> level_total(
        n_levels, MatX<Real>::Zero(config.f_dim, config.table_size));
    LossTerms step_loss;
    for (auto& s : scratch) {
      total.add(s.grads);
      s.grads.set_zero();
      for (int l = 0; l < n_levels; ++l) {
        level_total[l] += s.level_grads[l];
        s.level_grads[l].setZero();
      }
      step_loss.add(s.loss);
      s.loss = LossTerms{};
    }

    adam_step(model.mlp, total, mlp_state, adam);
    for (int l = 0; l < n_levels; ++l) {
      ++grid_states[l].step;
      adam_update_tensor<Real>(model.grid.levels[l].table, level_total[l],
                               grid_states[l].m[0], grid_states[l].v[0],
                               grid_states[l].step, adam);
    }

    if (config.log && ((step + 1) % config.log_every == 0 || step + 1 == config.steps)) {
      (*config.log) << "step " << (step + 1) << " loss " << step_loss.total
                    << " occ " << step_loss.occlusion_bce << " t "
                    << step_loss.local_t_mae << " normal " << step_loss.normal_cosine
                    << " albedo " << step_loss.albedo_rel_l2 << " material "
                    << step_loss.material_ce << "\n";
    }
  }

  return model;
}

}  // namespace lsnif
