#pragma once

#include "lsnif/dda.hpp"
#include "lsnif/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace lsnif {

// Instant-NGP style spatial hash shared by all levels; table_size is the
// hash-map entry count M.
inline std::uint32_t hash_vertex(int ix, int iy, int iz, std::uint32_t table_size) {
  const std::uint32_t h = static_cast<std::uint32_t>(ix) * 1u ^
                          static_cast<std::uint32_t>(iy) * 2654435761u ^
                          static_cast<std::uint32_t>(iz) * 805459861u;
  return h % table_size;
}

template <typename S>
struct HashGridLevelT {
  int resolution = 0;  // grid vertices run 0..resolution per axis
  MatX<S> table;       // F x M, one feature column per hash entry
  MatX<S> grad;        // accumulated gradients, same shape
};

template <typename S>
struct SparseHashGridT {
  int voxel_res = 0;  // level resolutions are integer multiples of this
  int f_dim = 0;
  std::uint32_t table_size = 0;
  std::vector<HashGridLevelT<S>> levels;

  int n_levels() const { return static_cast<int>(levels.size()); }
  void zero_grad() {
    for (auto& level : levels) level.grad.setZero();
  }
};

template <typename S>
SparseHashGridT<S> make_sparse_hash_grid(int voxel_res,
                                         const std::vector<int>& level_res,
                                         int f_dim, std::uint32_t table_size,
                                         std::uint64_t seed) {
  if (level_res.empty()) throw std::invalid_argument("need at least one grid level");
  SparseHashGridT<S> grid;
  grid.voxel_res = voxel_res;
  grid.f_dim = f_dim;
  grid.table_size = table_size;
  std::mt19937 rng(seed_stream(seed, 0x9dd1));
  std::uniform_real_distribution<double> dist(-1e-4, 1e-4);
  for (int r : level_res) {
    if (r % voxel_res != 0)
      throw std::invalid_argument("level resolution must be a multiple of the voxel resolution");
    HashGridLevelT<S> level;
    level.resolution = r;
    level.table.resize(f_dim, table_size);
    for (std::uint32_t e = 0; e < table_size; ++e)
      for (int f = 0; f < f_dim; ++f) level.table(f, e) = static_cast<S>(dist(rng));
    level.grad = MatX<S>::Zero(f_dim, table_size);
    grid.levels.push_back(std::move(level));
  }
  return grid;
}

// Interpolation footprint of one point on one level: the hashed vertex
// indices and their weights. Boundary points touch 4 in-plane vertices;
// the volume fallback (rays starting inside an occupied cell) touches 8.
template <typename S>
struct PointCodeT {
  std::uint32_t index[8];
  S weight[8];
  int count = 0;
};

namespace detail {

template <typename S>
void encode_point_level(const HashGridLevelT<S>& level, std::uint32_t table_size,
                        int voxel_res, const Vec3& p, bool volume,
                        S* features, PointCodeT<S>* code) {
  const int res = level.resolution;
  const S fres = static_cast<S>(res);
  S u[3];
  for (int a = 0; a < 3; ++a) u[a] = static_cast<S>(p[a]) * fres;

  int base[3];
  S frac[3];
  int plane_axis = -1;
  if (!volume) {
    // Boundary points sit on a voxel plane, which is a grid plane on every
    // level (resolutions are multiples of the voxel resolution). Snap the
    // normal coordinate and interpolate the 4 in-plane vertices.
    S best = std::numeric_limits<S>::max();
    for (int a = 0; a < 3; ++a) {
      const S scaled = static_cast<S>(p[a]) * static_cast<S>(voxel_res);
      const S dist = std::abs(scaled - std::round(scaled));
      if (dist < best) {
        best = dist;
        plane_axis = a;
      }
    }
  }
  for (int a = 0; a < 3; ++a) {
    if (a == plane_axis) {
      base[a] = std::clamp(static_cast<int>(std::round(u[a])), 0, res);
      frac[a] = S(0);
    } else {
      base[a] = std::clamp(static_cast<int>(std::floor(u[a])), 0, res - 1);
      frac[a] = std::clamp(u[a] - static_cast<S>(base[a]), S(0), S(1));
    }
  }

  if (code) code->count = 0;
  for (int f = 0; f < static_cast<int>(level.table.rows()); ++f) features[f] = S(0);
  for (int corner = 0; corner < 8; ++corner) {
    const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
    if (plane_axis == 0 && dx) continue;
    if (plane_axis == 1 && dy) continue;
    if (plane_axis == 2 && dz) continue;
    const S wx = dx ? frac[0] : S(1) - frac[0];
    const S wy = dy ? frac[1] : S(1) - frac[1];
    const S wz = dz ? frac[2] : S(1) - frac[2];
    const S w = wx * wy * wz;
    const std::uint32_t idx =
        hash_vertex(base[0] + dx, base[1] + dy, base[2] + dz, table_size);
    if (code) {
      code->index[code->count] = idx;
      code->weight[code->count] = w;
      ++code->count;
    }
    for (int f = 0; f < static_cast<int>(level.table.rows()); ++f)
      features[f] += w * level.table(f, idx);
  }
}

}  // namespace detail

// Per-level features for one point, concatenated level 0 first. `features`
// must hold n_levels * f_dim entries and `codes` n_levels entries; pass null
// codes to skip the backprop bookkeeping (inference).
template <typename S>
void encode_point(const SparseHashGridT<S>& grid, const Vec3& p, bool volume,
                  S* features, PointCodeT<S>* codes) {
  for (int l = 0; l < grid.n_levels(); ++l)
    detail::encode_point_level(grid.levels[l], grid.table_size, grid.voxel_res, p,
                               volume, features + l * grid.f_dim,
                               codes ? codes + l : nullptr);
}

template <typename S>
struct EncodedInputT {
  VecX<S> values;                     // hit_cap * n_levels * f_dim, zero padded
  std::vector<PointCodeT<S>> codes;   // point_count * n_levels, level-minor
  int point_count = 0;
};

// Writes the concatenated features of `hits` into a preallocated column and
// code buffer; slots past hits.count stay exactly zero.
template <typename S>
void encode_ray_into(const SparseHashGridT<S>& grid, const BoundaryHits& hits,
                     int hit_cap, S* column, PointCodeT<S>* codes, int& point_count) {
  const int lf = grid.n_levels() * grid.f_dim;
  point_count = std::min(hits.count(), hit_cap);
  for (int i = 0; i < hit_cap * lf; ++i) column[i] = S(0);
  for (int i = 0; i < point_count; ++i) {
    const bool volume = (i == 0) && hits.first_is_origin;
    encode_point(grid, hits.points[i], volume, column + i * lf,
                 codes ? codes + i * grid.n_levels() : nullptr);
  }
}

template <typename S>
EncodedInputT<S> encode_ray(const SparseHashGridT<S>& grid, const BoundaryHits& hits,
                            int hit_cap) {
  EncodedInputT<S> enc;
  enc.values = VecX<S>::Zero(hit_cap * grid.n_levels() * grid.f_dim);
  enc.codes.resize(static_cast<size_t>(std::min(hits.count(), hit_cap)) *
                   grid.n_levels());
  encode_ray_into(grid, hits, hit_cap, enc.values.data(), enc.codes.data(),
                  enc.point_count);
  return enc;
}

// Scatter-adds weight * upstream into per-level gradient accumulators for
// every vertex touched by the forward pass that produced `codes`. The bare
// overload lets workers keep private accumulators that are reduced later.
template <typename S>
void accumulate_grad_into(std::vector<MatX<S>>& level_grads, int f_dim,
                          const PointCodeT<S>* codes, int point_count,
                          const S* upstream) {
  const int n_levels = static_cast<int>(level_grads.size());
  for (int i = 0; i < point_count; ++i) {
    for (int l = 0; l < n_levels; ++l) {
      const PointCodeT<S>& code = codes[i * n_levels + l];
      auto& gmat = level_grads[l];
      const S* up = upstream + (i * n_levels + l) * f_dim;
      for (int k = 0; k < code.count; ++k) {
        const S w = code.weight[k];
        for (int f = 0; f < f_dim; ++f) gmat(f, code.index[k]) += w * up[f];
      }
    }
  }
}

template <typename S>
void accumulate_grad(SparseHashGridT<S>& grid, const PointCodeT<S>* codes,
                     int point_count, const S* upstream) {
  const int f_dim = grid.f_dim;
  for (int i = 0; i < point_count; ++i) {
    for (int l = 0; l < grid.n_levels(); ++l) {
      const PointCodeT<S>& code = codes[i * grid.n_levels() + l];
      auto& gmat = grid.levels[l].grad;
      const S* up = upstream + (i * grid.n_levels() + l) * f_dim;
      for (int k = 0; k < code.count; ++k) {
        const S w = code.weight[k];
        for (int f = 0; f < f_dim; ++f) gmat(f, code.index[k]) += w * up[f];
      }
    }
  }
}

template <typename S>
void accumulate_grad(SparseHashGridT<S>& grid, const EncodedInputT<S>& enc,
                     const VecX<S>& upstream) {
  accumulate_grad(grid, enc.codes.data(), enc.point_count, upstream.data());
}

using SparseHashGrid = SparseHashGridT<Real>;
using EncodedInput = EncodedInputT<Real>;
using PointCode = PointCodeT<Real>;

}  // namespace lsnif
