#pragma once

#include "lsnif/image.hpp"
#include "lsnif/model_io.hpp"
#include "lsnif/training.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lsnif {

// Per-signal error report against the BVH oracle. Signal errors are averaged
// over true positives (both the model and the oracle report a hit).
struct EvalReport {
  long n_rays = 0;
  long tp = 0, tn = 0, fp = 0, fn = 0;
  double occlusion_accuracy = 0;
  double occlusion_precision = 0;
  double occlusion_recall = 0;
  double mean_abs_local_t = 0;
  double mean_normal_angle_deg = 0;
  double albedo_mae = 0;
  double material_accuracy = 0;
};

// Draws fresh balanced rays (≈50% external / 50% surface origins), labels
// them with the BVH oracle, infers and aggregates.
EvalReport eval_model(const LsnifModel& model, const Mesh& mesh, long n_rays,
                      std::uint64_t seed);

void print_report(std::ostream& out, const EvalReport& report);

// Scalar used for ablation trend checks: occlusion error plus normalized
// angular normal error, both in [0, 1].
double composite_error(const EvalReport& report);

enum class AblateParam { voxel_res, hit_cap, table_size_log2, steps, width };
AblateParam ablate_param_from_string(const std::string& name);  // V|H|M|T|width

struct AblateCell {
  int value = 0;
  EvalReport report;
  double composite = 0;
};

// Trains one model per value (other parameters fixed from `base`, shared
// seed) and evaluates each against the fixture mesh.
std::vector<AblateCell> ablate(AblateParam param, const std::vector<int>& values,
                               const Mesh& fixture, const TrainConfig& base,
                               long eval_rays, std::uint64_t eval_seed,
                               std::ostream* progress = nullptr);

void print_ablation(std::ostream& out, AblateParam param,
                    const std::vector<AblateCell>& cells);
void write_ablation_csv(const std::string& path, AblateParam param,
                        const std::vector<AblateCell>& cells);

struct ImageDelta {
  double mae = 0;
  double rmse = 0;
};
ImageDelta compare_images(const Image& a, const Image& b);  // throws on size mismatch

}  // namespace lsnif
