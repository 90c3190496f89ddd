#include "lsnif/metrics.hpp"
#include "lsnif/obj.hpp"
#include "lsnif/renderer.hpp"
#include "lsnif/shapes.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace lsnif;

// "builtin:sphere|box|torus" resolve to the generated fixtures so training
// and ablations run without external assets.
Mesh load_mesh_arg(const std::string& path) {
  if (path == "builtin:sphere") return make_uv_sphere();
  if (path == "builtin:box") return make_box();
  if (path == "builtin:torus") return make_torus();
  return load_obj(path);
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> values;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) values.push_back(std::stoi(token));
  return values;
}

void add_train_options(CLI::App* cmd, TrainConfig& config, int& hash_log2) {
  cmd->add_option("--steps", config.steps, "training steps T");
  cmd->add_option("--batch", config.batch, "rays per step");
  cmd->add_option("--lr", config.lr, "Adam learning rate");
  cmd->add_option("--hit-cap", config.hit_cap, "max boundary points per ray H");
  cmd->add_option("--voxel-res", config.voxel_res, "occupancy resolution V");
  cmd->add_option("--hash-size-log2", hash_log2, "hash table entries per level, log2");
  cmd->add_option("--width", config.hidden_width, "MLP hidden width");
  cmd->add_option("--seed", config.seed, "RNG seed");
  cmd->add_option("--workers", config.workers, "worker threads (1 = deterministic)");
}

int run_voxelize(const std::string& obj_path, int voxel_res) {
  const Mesh mesh = load_mesh_arg(obj_path);
  const LocalFrame frame = LocalFrame::for_mesh(mesh);
  const OccupancyGrid grid = voxelize_surface(mesh, frame, voxel_res);
  const long total = static_cast<long>(voxel_res) * voxel_res * voxel_res;
  std::cout << "resolution   " << voxel_res << "^3\n"
            << "triangles    " << mesh.n_faces() << "\n"
            << "occupied     " << grid.popcount() << " / " << total << "\n"
            << "bytes        " << grid.bytes().size() << "\n";
  return 0;
}

int run_train(const std::string& obj_path, const std::string& out_path,
              TrainConfig config) {
  const Mesh mesh = load_mesh_arg(obj_path);
  config.log = &std::cout;
  const LsnifModel model = train(mesh, config);
  save_model(model, out_path);
  const Footprint fp = footprint(model);
  std::cout << "saved " << out_path << " (" << fp.total << " bytes payload)\n";
  return 0;
}

int run_eval(const std::string& model_path, const std::string& obj_path, long rays,
             std::uint64_t seed, const std::string& csv_path) {
  const LsnifModel model = load_model(model_path);
  const Mesh mesh = load_mesh_arg(obj_path);
  const EvalReport report = eval_model(model, mesh, rays, seed);
  print_report(std::cout, report);
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    csv << "occlusion_accuracy,occlusion_precision,occlusion_recall,"
           "mean_abs_local_t,mean_normal_angle_deg,albedo_mae,material_accuracy\n"
        << report.occlusion_accuracy << ',' << report.occlusion_precision << ','
        << report.occlusion_recall << ',' << report.mean_abs_local_t << ','
        << report.mean_normal_angle_deg << ',' << report.albedo_mae << ','
        << report.material_accuracy << "\n";
  }
  return 0;
}

int run_render(const std::string& scene_path, const std::string& out_path,
               const std::string& ppm_path, const RenderConfig& config,
               bool reference) {
  const Scene scene = load_scene(scene_path);
  const PreparedScene prepared = PreparedScene::prepare(scene);
  const Image image =
      reference ? render_reference(prepared, config) : render(prepared, config);
  if (!out_path.empty()) write_pfm(image, out_path);
  if (!ppm_path.empty()) write_ppm(image, ppm_path);
  std::cout << "rendered " << config.width << "x" << config.height << " at "
            << config.spp << " spp\n";
  return 0;
}

int run_compare(const std::string& a_path, const std::string& b_path) {
  const Image a = read_pfm(a_path);
  const Image b = read_pfm(b_path);
  const ImageDelta delta = compare_images(a, b);
  std::cout << "MAE  " << delta.mae << "\nRMSE " << delta.rmse << "\n";
  return 0;
}

int run_stats(const std::string& model_path) {
  const LsnifModel model = load_model(model_path);
  const Footprint fp = footprint(model);
  std::cout << "component   bytes\n"
            << "voxels      " << fp.voxels << "\n"
            << "encoder     " << fp.encoder << "\n"
            << "mlp         " << fp.mlp << "\n"
            << "total       " << fp.total << "\n"
            << "overhead    " << fp.overhead << " (header + materials + aabb)\n";
  return 0;
}

int run_ablate(const std::string& obj_path, const std::string& param_name,
               const std::string& values_csv, const TrainConfig& base, long rays,
               std::uint64_t eval_seed, const std::string& csv_path) {
  const Mesh mesh = load_mesh_arg(obj_path);
  const AblateParam param = ablate_param_from_string(param_name);
  const std::vector<int> values = parse_int_list(values_csv);
  const auto cells = ablate(param, values, mesh, base, rays, eval_seed, &std::cout);
  print_ablation(std::cout, param, cells);
  if (!csv_path.empty()) write_ablation_csv(csv_path, param, cells);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LSNIF: train and render neural bottom-level intersection bundles"};
  app.require_subcommand(1);

  std::string obj_path, model_path, out_path, ppm_path, scene_path;
  std::string a_path, b_path, param_name, values_csv, csv_path;
  TrainConfig train_config;
  RenderConfig render_config;
  long rays = 100000;
  std::uint64_t eval_seed = 1;
  int voxel_res = 32;
  int hash_log2 = 17;
  int square_size = 0;
  std::string primary_str = "bvh";
  bool reference = false;

  auto* voxelize = app.add_subcommand("voxelize", "voxelize a mesh surface");
  voxelize->add_option("--obj", obj_path, "OBJ path or builtin:{sphere,box,torus}")
      ->required();
  voxelize->add_option("--voxel-res", voxel_res, "resolution per axis");

  auto* train_cmd = app.add_subcommand("train", "train a model for one mesh");
  train_cmd->add_option("--obj", obj_path, "OBJ path or builtin fixture")->required();
  train_cmd->add_option("--out", out_path, "output model path")->required();
  add_train_options(train_cmd, train_config, hash_log2);

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model against its mesh");
  eval_cmd->add_option("--model", model_path)->required();
  eval_cmd->add_option("--obj", obj_path)->required();
  eval_cmd->add_option("--rays", rays, "evaluation ray count");
  eval_cmd->add_option("--seed", eval_seed);
  eval_cmd->add_option("--csv", csv_path, "also write the report as CSV");

  auto* render_cmd = app.add_subcommand("render", "path trace a scene file");
  render_cmd->add_option("--scene", scene_path)->required();
  render_cmd->add_option("--out", out_path, "PFM output path");
  render_cmd->add_option("--ppm", ppm_path, "PPM output path (gamma 2.2)");
  render_cmd->add_option("--size", square_size, "square image size");
  render_cmd->add_option("--width", render_config.width);
  render_cmd->add_option("--height", render_config.height);
  render_cmd->add_option("--spp", render_config.spp);
  render_cmd->add_option("--bounces", render_config.max_bounces);
  render_cmd->add_option("--seed", render_config.seed);
  render_cmd->add_option("--workers", render_config.workers);
  render_cmd->add_option("--primary", primary_str, "primary visibility: bvh | lsnif")
      ->check(CLI::IsMember({"bvh", "lsnif"}));
  render_cmd->add_flag("--reference", reference,
                       "plain BVH renderer (no neural machinery)");

  auto* compare_cmd = app.add_subcommand("compare", "MAE/RMSE between two PFMs");
  compare_cmd->add_option("a", a_path, "first image")->required();
  compare_cmd->add_option("b", b_path, "second image")->required();

  auto* stats_cmd = app.add_subcommand("stats", "memory footprint breakdown");
  stats_cmd->add_option("--model", model_path)->required();

  auto* ablate_cmd = app.add_subcommand("ablate", "sweep one parameter");
  ablate_cmd->add_option("--obj", obj_path)->required();
  ablate_cmd->add_option("--param", param_name, "V | H | M | T | width")->required();
  ablate_cmd->add_option("--values", values_csv, "comma-separated ascending values")
      ->required();
  ablate_cmd->add_option("--rays", rays, "evaluation ray count");
  ablate_cmd->add_option("--eval-seed", eval_seed);
  ablate_cmd->add_option("--csv", csv_path, "write the table as CSV");
  add_train_options(ablate_cmd, train_config, hash_log2);

  CLI11_PARSE(app, argc, argv);

  train_config.table_size = 1u << hash_log2;
  if (square_size > 0) render_config.width = render_config.height = square_size;
  render_config.primary = primary_str == "lsnif" ? RenderConfig::PrimaryMode::lsnif
                                                 : RenderConfig::PrimaryMode::bvh;

  try {
    if (voxelize->parsed()) return run_voxelize(obj_path, voxel_res);
    if (train_cmd->parsed()) return run_train(obj_path, out_path, train_config);
    if (eval_cmd->parsed())
      return run_eval(model_path, obj_path, rays, eval_seed, csv_path);
    if (render_cmd->parsed())
      return run_render(scene_path, out_path, ppm_path, render_config, reference);
    if (compare_cmd->parsed()) return run_compare(a_path, b_path);
    if (stats_cmd->parsed()) return run_stats(model_path);
    if (ablate_cmd->parsed())
      return run_ablate(obj_path, param_name, values_csv, train_config, rays,
                        eval_seed, csv_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
