#include "lsnif/model_io.hpp"

#include "lsnif/half.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace lsnif {
namespace {

constexpr char kMagic[4] = {'L', 'S', 'N', 'F'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

void write_f32(std::ostream& out, float v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

void write_half(std::ostream& out, float v) {
  const std::uint16_t h = float_to_half(v);
  out.write(reinterpret_cast<const char*>(&h), 2);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v;
  if (!in.read(reinterpret_cast<char*>(&v), 4))
    throw std::runtime_error("model file truncated");
  return v;
}

float read_f32(std::istream& in) {
  float v;
  if (!in.read(reinterpret_cast<char*>(&v), 4))
    throw std::runtime_error("model file truncated");
  return v;
}

float read_half(std::istream& in) {
  std::uint16_t h;
  if (!in.read(reinterpret_cast<char*>(&h), 2))
    throw std::runtime_error("model file truncated");
  return half_to_float(h);
}

void write_matrix_half(std::ostream& out, const MatX<Real>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) write_half(out, m(r, c));
}

void read_matrix_half(std::istream& in, MatX<Real>& m, int rows, int cols) {
  m.resize(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = read_half(in);
}

void write_vector_half(std::ostream& out, const VecX<Real>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) write_half(out, v[i]);
}

void read_vector_half(std::istream& in, VecX<Real>& v, int size) {
  v.resize(size);
  for (int i = 0; i < size; ++i) v[i] = read_half(in);
}

}  // namespace

void save_model(const LsnifModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open model file for writing: " + path);

  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(model.voxel_res));
  write_u32(out, static_cast<std::uint32_t>(model.hit_cap));
  write_u32(out, static_cast<std::uint32_t>(model.grid.n_levels()));
  write_u32(out, static_cast<std::uint32_t>(model.grid.f_dim));
  write_u32(out, model.grid.table_size);
  write_u32(out, static_cast<std::uint32_t>(model.mlp.hidden_width()));
  write_u32(out, static_cast<std::uint32_t>(model.n_mat()));

  const auto& bits = model.occupancy.bytes();
  out.write(reinterpret_cast<const char*>(bits.data()),
            static_cast<std::streamsize>(bits.size()));

  for (const auto& level : model.grid.levels) {
    write_u32(out, static_cast<std::uint32_t>(level.resolution));
    // Column-major F x M storage is exactly entry-major on disk.
    for (std::uint32_t e = 0; e < model.grid.table_size; ++e)
      for (int f = 0; f < model.grid.f_dim; ++f) write_half(out, level.table(f, e));
  }

  write_matrix_half(out, model.mlp.w1);
  write_vector_half(out, model.mlp.b1);
  write_matrix_half(out, model.mlp.w2);
  write_vector_half(out, model.mlp.b2);
  write_matrix_half(out, model.mlp.w3);
  write_vector_half(out, model.mlp.b3);

  write_u32(out, static_cast<std::uint32_t>(model.materials.size()));
  for (const Material& m : model.materials) {
    for (int c = 0; c < 3; ++c) write_f32(out, m.albedo[c]);
    write_u32(out, m.kind == MaterialKind::glossy ? 1u : 0u);
    write_f32(out, m.roughness);
  }

  for (int c = 0; c < 3; ++c) write_f32(out, model.aabb.min[c]);
  for (int c = 0; c < 3; ++c) write_f32(out, model.aabb.max[c]);

  if (!out) throw std::runtime_error("failed writing model file: " + path);
}

LsnifModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);

  char magic[4];
  if (!in.read(magic, 4)) throw std::runtime_error("model file truncated");
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not an LSNIF model file (bad magic): " + path);
  const std::uint32_t version = read_u32(in);
  if (version != kVersion)
    throw std::runtime_error("unsupported model version " + std::to_string(version));

  LsnifModel model;
  model.voxel_res = static_cast<int>(read_u32(in));
  model.hit_cap = static_cast<int>(read_u32(in));
  const int n_levels = static_cast<int>(read_u32(in));
  const int f_dim = static_cast<int>(read_u32(in));
  const std::uint32_t table_size = read_u32(in);
  const int hidden = static_cast<int>(read_u32(in));
  const int n_mat = static_cast<int>(read_u32(in));

  model.occupancy = OccupancyGrid(model.voxel_res);
  auto& bits = model.occupancy.bytes();
  if (!in.read(reinterpret_cast<char*>(bits.data()),
               static_cast<std::streamsize>(bits.size())))
    throw std::runtime_error("model file truncated");

  model.grid.voxel_res = model.voxel_res;
  model.grid.f_dim = f_dim;
  model.grid.table_size = table_size;
  for (int l = 0; l < n_levels; ++l) {
    HashGridLevelT<Real> level;
    level.resolution = static_cast<int>(read_u32(in));
    level.table.resize(f_dim, table_size);
    for (std::uint32_t e = 0; e < table_size; ++e)
      for (int f = 0; f < f_dim; ++f) level.table(f, e) = read_half(in);
    level.grad = MatX<Real>::Zero(f_dim, table_size);
    model.grid.levels.push_back(std::move(level));
  }

  const int input_width = model.hit_cap * n_levels * f_dim;
  read_matrix_half(in, model.mlp.w1, hidden, input_width);
  read_vector_half(in, model.mlp.b1, hidden);
  read_matrix_half(in, model.mlp.w2, hidden, hidden);
  read_vector_half(in, model.mlp.b2, hidden);
  read_matrix_half(in, model.mlp.w3, kHeadMaterial + n_mat, hidden);
  read_vector_half(in, model.mlp.b3, kHeadMaterial + n_mat);

  const std::uint32_t mat_count = read_u32(in);
  model.materials.resize(mat_count);
  for (Material& m : model.materials) {
    for (int c = 0; c < 3; ++c) m.albedo[c] = read_f32(in);
    m.kind = read_u32(in) == 1u ? MaterialKind::glossy : MaterialKind::diffuse;
    m.roughness = read_f32(in);
  }

  for (int c = 0; c < 3; ++c) model.aabb.min[c] = read_f32(in);
  for (int c = 0; c < 3; ++c) model.aabb.max[c] = read_f32(in);
  return model;
}

Footprint footprint(const LsnifModel& model) {
  Footprint fp;
  const std::size_t v = static_cast<std::size_t>(model.voxel_res);
  fp.voxels = v * v * v / 8;
  fp.encoder = static_cast<std::size_t>(model.grid.n_levels()) * model.grid.table_size *
               static_cast<std::size_t>(model.grid.f_dim) * 2;
  fp.mlp = model.mlp.parameter_count() * 2;
  fp.total = fp.voxels + fp.encoder + fp.mlp;
  // Header fields, per-level resolution tags, material table, AABB.
  fp.overhead = 4 + 8 * 4 + static_cast<std::size_t>(model.grid.n_levels()) * 4 + 4 +
                model.materials.size() * (3 * 4 + 4 + 4) + 6 * 4;
  return fp;
}

}  // namespace lsnif
