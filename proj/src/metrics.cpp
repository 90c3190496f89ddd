#include "lsnif/metrics.hpp"

#include "lsnif/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lsnif {

EvalReport eval_model(const LsnifModel& model, const Mesh& mesh, long n_rays,
                      std::uint64_t seed) {
  const LocalFrame frame = model.frame();
  std::vector<Aabb> boxes(mesh.n_faces());
  for (int f = 0; f < mesh.n_faces(); ++f) {
    Aabb b;
    for (int k = 0; k < 3; ++k) b.extend(mesh.vertices[mesh.faces[f][k]]);
    boxes[f] = b;
  }
  const Bvh bvh = build_bvh(boxes);

  EvalReport report;
  report.n_rays = n_rays;
  double sum_dt = 0, sum_angle = 0, sum_albedo = 0;
  long material_correct = 0;

  Rng rng(seed_stream(seed, 0xe7a1));
  std::bernoulli_distribution pick_external(0.5);

  MatX<Real> input(model.input_width(), 1);
  std::vector<RayInterval> interval(1);
  for (long i = 0; i < n_rays; ++i) {
    const TrainSample sample = draw_sample(pick_external(rng), mesh, bvh, frame,
                                           model.occupancy, model.hit_cap, rng);
    const auto iv = ray_aabb_intersect(sample.ray, frame.aabb);
    interval[0] = *iv;  // draw_sample only returns rays that hit the box
    int point_count = 0;
    encode_ray_into<Real>(model.grid, sample.hits, model.hit_cap, input.col(0).data(),
                          nullptr, point_count);
    const NeuralHit nh = infer_batch(model, input, interval)[0];

    const bool pred = nh.occluded;
    const bool truth = sample.target_occluded;
    if (pred && truth) {
      ++report.tp;
      const Real span = std::max(interval[0].exit - interval[0].enter, Real(1e-12));
      const Real pred_local_t = (nh.t_world - interval[0].enter) / span;
      sum_dt += std::abs(static_cast<double>(pred_local_t - sample.target_local_t));
      const Vec3 n = nh.normal.squaredNorm() > Real(0) ? nh.normal : Vec3::UnitZ();
      const double cosine = std::clamp(
          static_cast<double>(n.dot(sample.target_normal)), -1.0, 1.0);
      sum_angle += std::acos(cosine) * 180.0 / M_PI;
      sum_albedo += (nh.albedo - sample.target_albedo).cwiseAbs().sum() / 3.0;
      if (nh.material_index == sample.target_material) ++material_correct;
    } else if (pred && !truth) {
      ++report.fp;
    } else if (!pred && truth) {
      ++report.fn;
    } else {
      ++report.tn;
    }
  }

  const double n = static_cast<double>(n_rays);
  report.occlusion_accuracy = (report.tp + report.tn) / n;
  report.occlusion_precision =
      report.tp + report.fp > 0 ? static_cast<double>(report.tp) / (report.tp + report.fp) : 0.0;
  report.occlusion_recall =
      report.tp + report.fn > 0 ? static_cast<double>(report.tp) / (report.tp + report.fn) : 0.0;
  if (report.tp > 0) {
    report.mean_abs_local_t = sum_dt / report.tp;
    report.mean_normal_angle_deg = sum_angle / report.tp;
    report.albedo_mae = sum_albedo / report.tp;
    report.material_accuracy = static_cast<double>(material_correct) / report.tp;
  }
  return report;
}

void print_report(std::ostream& out, const EvalReport& r) {
  out << std::fixed << std::setprecision(4);
  out << "rays              " << r.n_rays << "\n";
  out << "confusion         tp " << r.tp << "  tn " << r.tn << "  fp " << r.fp
      << "  fn " << r.fn << "\n";
  out << "occlusion acc     " << r.occlusion_accuracy << "\n";
  out << "occlusion prec    " << r.occlusion_precision << "\n";
  out << "occlusion recall  " << r.occlusion_recall << "\n";
  out << "mean |d local_t|  " << r.mean_abs_local_t << "\n";
  out << "normal angle deg  " << r.mean_normal_angle_deg << "\n";
  out << "albedo MAE        " << r.albedo_mae << "\n";
  out << "material acc      " << r.material_accuracy << "\n";
}

double composite_error(const EvalReport& report) {
  return (1.0 - report.occlusion_accuracy) + report.mean_normal_angle_deg / 180.0;
}

AblateParam ablate_param_from_string(const std::string& name) {
  if (name == "V") return AblateParam::voxel_res;
  if (name == "H") return AblateParam::hit_cap;
  if (name == "M") return AblateParam::table_size_log2;
  if (name == "T") return AblateParam::steps;
  if (name == "width") return AblateParam::width;
  throw std::invalid_argument("unknown ablation parameter '" + name +
                              "' (expected V, H, M, T or width)");
}

namespace {

const char* param_name(AblateParam p) {
  switch (p) {
    case AblateParam::voxel_res: return "V";
    case AblateParam::hit_cap: return "H";
    case AblateParam::table_size_log2: return "M_log2";
    case AblateParam::steps: return "T";
    case AblateParam::width: return "width";
  }
  return "?";
}

TrainConfig apply_param(TrainConfig config, AblateParam param, int value) {
  switch (param) {
    case AblateParam::voxel_res: config.voxel_res = value; break;
    case AblateParam::hit_cap: config.hit_cap = value; break;
    case AblateParam::table_size_log2: config.table_size = 1u << value; break;
    case AblateParam::steps: config.steps = value; break;
    case AblateParam::width: config.hidden_width = value; break;
  }
  return config;
}

}  // namespace

std::vector<AblateCell> ablate(AblateParam param, const std::vector<int>& values,
                               const Mesh& fixture, const TrainConfig& base,
                               long eval_rays, std::uint64_t eval_seed,
                               std::ostream* progress) {
  for (size_t i = 1; i < values.size(); ++i)
    if (values[i] <= values[i - 1])
      throw std::invalid_argument("ablation values must be sorted ascending");
  std::vector<AblateCell> cells;
  for (int value : values) {
    if (progress)
      (*progress) << "ablate " << param_name(param) << " = " << value << "\n";
    const TrainConfig config = apply_param(base, param, value);
    const LsnifModel model = train(fixture, config);
    AblateCell cell;
    cell.value = value;
    cell.report = eval_model(model, fixture, eval_rays, eval_seed);
    cell.composite = composite_error(cell.report);
    cells.push_back(std::move(cell));
    if (progress) {
      (*progress) << "  composite " << cells.back().composite << " (occ acc "
                  << cells.back().report.occlusion_accuracy << ", normal "
                  << cells.back().report.mean_normal_angle_deg << " deg)\n";
    }
  }
  return cells;
}

void print_ablation(std::ostream& out, AblateParam param,
                    const std::vector<AblateCell>& cells) {
  out << std::left << std::setw(8) << param_name(param) << std::setw(12)
      << "composite" << std::setw(10) << "occ_acc" << std::setw(12) << "normal_deg"
      << std::setw(12) << "local_t" << std::setw(10) << "alb_mae" << "mat_acc\n";
  out << std::fixed << std::setprecision(4);
  for (const AblateCell& c : cells) {
    out << std::left << std::setw(8) << c.value << std::setw(12) << c.composite
        << std::setw(10) << c.report.occlusion_accuracy << std::setw(12)
        << c.report.mean_normal_angle_deg << std::setw(12) << c.report.mean_abs_local_t
        << std::setw(10) << c.report.albedo_mae << c.report.material_accuracy << "\n";
  }
}

void write_ablation_csv(const std::string& path, AblateParam param,
                        const std::vector<AblateCell>& cells) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open csv for writing: " + path);
  out << param_name(param)
      << ",composite,occlusion_accuracy,occlusion_precision,occlusion_recall,"
         "mean_abs_local_t,mean_normal_angle_deg,albedo_mae,material_accuracy\n";
  for (const AblateCell& c : cells) {
    out << c.value << ',' << c.composite << ',' << c.report.occlusion_accuracy << ','
        << c.report.occlusion_precision << ',' << c.report.occlusion_recall << ','
        << c.report.mean_abs_local_t << ',' << c.report.mean_normal_angle_deg << ','
        << c.report.albedo_mae << ',' << c.report.material_accuracy << "\n";
  }
}

ImageDelta compare_images(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("compare_images: dimension mismatch");
  double sum_abs = 0, sum_sq = 0;
  for (size_t i = 0; i < a.pixels.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double d = static_cast<double>(a.pixels[i][c]) - b.pixels[i][c];
      sum_abs += std::abs(d);
      sum_sq += d * d;
    }
  }
  const double n = static_cast<double>(a.pixels.size()) * 3.0;
  ImageDelta delta;
  delta.mae = sum_abs / n;
  delta.rmse = std::sqrt(sum_sq / n);
  return delta;
}

}  // namespace lsnif
