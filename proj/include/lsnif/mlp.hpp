#pragma once

#include "lsnif/types.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace lsnif {

// Output head layout: [occlusion, local_t, normal xyz, albedo rgb,
// material logits...], i.e. 8 + n_mat rows.
inline constexpr int kHeadOcclusion = 0;
inline constexpr int kHeadLocalT = 1;
inline constexpr int kHeadNormal = 2;
inline constexpr int kHeadAlbedo = 5;
inline constexpr int kHeadMaterial = 8;

inline constexpr Real kLeakySlope = Real(0.01);

template <typename S>
struct MlpParamsT {
  MatX<S> w1;
  VecX<S> b1;
  MatX<S> w2;
  VecX<S> b2;
  MatX<S> w3;
  VecX<S> b3;

  int input_width() const { return static_cast<int>(w1.cols()); }
  int hidden_width() const { return static_cast<int>(w1.rows()); }
  int output_width() const { return static_cast<int>(w3.rows()); }
  int n_mat() const { return output_width() - kHeadMaterial; }
  std::size_t parameter_count() const {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size() +
                                    w3.size() + b3.size());
  }
};

// Kaiming (fan-in) normal init: entries ~ N(0, 2 / fan_in).
template <typename S>
MatX<S> kaiming_init(int rows, int cols, std::mt19937& rng) {
  if (cols <= 0) throw std::invalid_argument("kaiming_init: fan_in must be positive");
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / cols));
  MatX<S> m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = static_cast<S>(dist(rng));
  return m;
}

template <typename S>
MlpParamsT<S> make_mlp(int input_width, int hidden_width, int n_mat,
                       std::uint64_t seed) {
  std::mt19937 rng(seed_stream(seed, 0x3b8d));
  MlpParamsT<S> p;
  p.w1 = kaiming_init<S>(hidden_width, input_width, rng);
  p.b1 = VecX<S>::Zero(hidden_width);
  p.w2 = kaiming_init<S>(hidden_width, hidden_width, rng);
  p.b2 = VecX<S>::Zero(hidden_width);
  p.w3 = kaiming_init<S>(kHeadMaterial + n_mat, hidden_width, rng);
  p.b3 = VecX<S>::Zero(kHeadMaterial + n_mat);
  return p;
}

template <typename S>
struct HeadOutputsT {
  S occlusion_prob;
  S local_t;
  Vec3T<S> normal;  // identity activation, unnormalized
  Vec3T<S> albedo;
  VecX<S> material_probs;
};

// Activations applied per column of the linear output z: sigmoid for
// occlusion / local_t / albedo, identity for the normal, stabilized softmax
// for the material block.
template <typename S>
void apply_heads(const MatX<S>& z, MatX<S>& p) {
  const int n_mat = static_cast<int>(z.rows()) - kHeadMaterial;
  p.resizeLike(z);
  auto sig = [](S v) { return S(1) / (S(1) + std::exp(-v)); };
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    p(kHeadOcclusion, j) = sig(z(kHeadOcclusion, j));
    p(kHeadLocalT, j) = sig(z(kHeadLocalT, j));
    p.template block<3, 1>(kHeadNormal, j) = z.template block<3, 1>(kHeadNormal, j);
    for (int k = 0; k < 3; ++k) p(kHeadAlbedo + k, j) = sig(z(kHeadAlbedo + k, j));
    const auto logits = z.col(j).segment(kHeadMaterial, n_mat);
    const S zmax = logits.maxCoeff();
    const VecX<S> e = (logits.array() - zmax).exp().matrix();
    p.col(j).segment(kHeadMaterial, n_mat) = e / e.sum();
  }
}

template <typename S>
struct MlpCacheT {
  MatX<S> x;   // input columns
  MatX<S> z1;  // pre-activations
  MatX<S> h1;
  MatX<S> z2;
  MatX<S> h2;
  MatX<S> p;   // head outputs (post-activation)
};

template <typename S>
MatX<S> leaky_relu(const MatX<S>& z) {
  return z.unaryExpr([](S v) { return v > S(0) ? v : S(kLeakySlope) * v; });
}

template <typename S>
MatX<S> leaky_relu_deriv(const MatX<S>& z) {
  return z.unaryExpr([](S v) { return v > S(0) ? S(1) : S(kLeakySlope); });
}

// Runs the network on the columns already stored in cache.x.
template <typename S>
void forward_cached(const MlpParamsT<S>& params, MlpCacheT<S>& cache) {
  if (cache.x.rows() != params.input_width())
    throw std::invalid_argument("mlp forward: input width mismatch");
  cache.z1.noalias() = params.w1 * cache.x;
  cache.z1.colwise() += params.b1;
  cache.h1 = leaky_relu(cache.z1);
  cache.z2.noalias() = params.w2 * cache.h1;
  cache.z2.colwise() += params.b2;
  cache.h2 = leaky_relu(cache.z2);
  MatX<S> z3;
  z3.noalias() = params.w3 * cache.h2;
  z3.colwise() += params.b3;
  apply_heads(z3, cache.p);
}

template <typename S>
void forward(const MlpParamsT<S>& params, const MatX<S>& x, MlpCacheT<S>& cache) {
  cache.x = x;
  forward_cached(params, cache);
}

template <typename S>
HeadOutputsT<S> heads_from_column(const MatX<S>& p, Eigen::Index j) {
  const int n_mat = static_cast<int>(p.rows()) - kHeadMaterial;
  HeadOutputsT<S> h;
  h.occlusion_prob = p(kHeadOcclusion, j);
  h.local_t = p(kHeadLocalT, j);
  h.normal = p.template block<3, 1>(kHeadNormal, j);
  h.albedo = p.template block<3, 1>(kHeadAlbedo, j);
  h.material_probs = p.col(j).segment(kHeadMaterial, n_mat);
  return h;
}

template <typename S>
HeadOutputsT<S> forward_single(const MlpParamsT<S>& params, const VecX<S>& x) {
  MlpCacheT<S> cache;
  forward(params, MatX<S>(x), cache);
  return heads_from_column(cache.p, 0);
}

template <typename S>
struct MlpGradsT {
  MatX<S> w1, w2, w3;
  VecX<S> b1, b2, b3;

  static MlpGradsT zeros_like(const MlpParamsT<S>& p) {
    MlpGradsT g;
    g.w1 = MatX<S>::Zero(p.w1.rows(), p.w1.cols());
    g.b1 = VecX<S>::Zero(p.b1.size());
    g.w2 = MatX<S>::Zero(p.w2.rows(), p.w2.cols());
    g.b2 = VecX<S>::Zero(p.b2.size());
    g.w3 = MatX<S>::Zero(p.w3.rows(), p.w3.cols());
    g.b3 = VecX<S>::Zero(p.b3.size());
    return g;
  }
  void set_zero() {
    w1.setZero(); b1.setZero();
    w2.setZero(); b2.setZero();
    w3.setZero(); b3.setZero();
  }
  void add(const MlpGradsT& o) {
    w1 += o.w1; b1 += o.b1;
    w2 += o.w2; b2 += o.b2;
    w3 += o.w3; b3 += o.b3;
  }
};

// Reverse pass from gradients w.r.t. the post-activation head outputs.
// Accumulates into `grads`; optionally emits the gradient w.r.t. the input.
template <typename S>
void backward(const MlpParamsT<S>& params, const MlpCacheT<S>& cache,
              const MatX<S>& dp, MlpGradsT<S>& grads, MatX<S>* dx = nullptr) {
  const int n_mat = params.n_mat();
  MatX<S> dz3(dp.rows(), dp.cols());
  for (Eigen::Index j = 0; j < dp.cols(); ++j) {
    for (int r : {kHeadOcclusion, kHeadLocalT, kHeadAlbedo, kHeadAlbedo + 1,
                  kHeadAlbedo + 2}) {
      // Clamped so a saturated sigmoid still cancels against the clamped
      // 1/(p(1-p)) factor of an upstream cross-entropy gradient.
      const S p = std::clamp(cache.p(r, j), S(1e-7), S(1) - S(1e-7));
      dz3(r, j) = dp(r, j) * p * (S(1) - p);
    }
    for (int k = 0; k < 3; ++k)
      dz3(kHeadNormal + k, j) = dp(kHeadNormal + k, j);
    const auto probs = cache.p.col(j).segment(kHeadMaterial, n_mat);
    const auto up = dp.col(j).segment(kHeadMaterial, n_mat);
    const S dot = probs.dot(up);
    dz3.col(j).segment(kHeadMaterial, n_mat) =
        probs.cwiseProduct(up - VecX<S>::Constant(n_mat, dot));
  }

  grads.w3.noalias() += dz3 * cache.h2.transpose();
  grads.b3 += dz3.rowwise().sum();

  MatX<S> dh2;
  dh2.noalias() = params.w3.transpose() * dz3;
  const MatX<S> dz2 = dh2.cwiseProduct(leaky_relu_deriv(cache.z2));
  grads.w2.noalias() += dz2 * cache.h1.transpose();
  grads.b2 += dz2.rowwise().sum();

  MatX<S> dh1;
  dh1.noalias() = params.w2.transpose() * dz2;
  const MatX<S> dz1 = dh1.cwiseProduct(leaky_relu_deriv(cache.z1));
  grads.w1.noalias() += dz1 * cache.x.transpose();
  grads.b1 += dz1.rowwise().sum();

  if (dx) dx->noalias() = params.w1.transpose() * dz1;
}

// Bias-corrected Adam on a flat parameter/gradient pair.
struct AdamConfig {
  Real lr = Real(0.01);
  Real beta1 = Real(0.9);
  Real beta2 = Real(0.999);
  Real eps = Real(1e-8);
};

template <typename S>
struct AdamStateT {
  std::vector<MatX<S>> m;
  std::vector<MatX<S>> v;
  long step = 0;
};

template <typename S>
void adam_update_tensor(Eigen::Ref<MatX<S>> param, const MatX<S>& grad, MatX<S>& m,
                        MatX<S>& v, long step, const AdamConfig& cfg) {
  const S b1 = static_cast<S>(cfg.beta1);
  const S b2 = static_cast<S>(cfg.beta2);
  m = b1 * m + (S(1) - b1) * grad;
  v = b2 * v + (S(1) - b2) * grad.cwiseProduct(grad);
  const S corr1 = S(1) - std::pow(b1, static_cast<S>(step));
  const S corr2 = S(1) - std::pow(b2, static_cast<S>(step));
  param.array() -= static_cast<S>(cfg.lr) * (m.array() / corr1) /
                   ((v.array() / corr2).sqrt() + static_cast<S>(cfg.eps));
}

// One optimizer step over all six MLP tensors; state is created lazily.
template <typename S>
void adam_step(MlpParamsT<S>& params, const MlpGradsT<S>& grads, AdamStateT<S>& state,
               const AdamConfig& cfg) {
  if (state.m.empty()) {
    auto zeros = [](const auto& t) { return MatX<S>::Zero(t.rows(), t.cols()); };
    state.m = {zeros(params.w1), zeros(params.b1), zeros(params.w2),
               zeros(params.b2), zeros(params.w3), zeros(params.b3)};
    state.v = state.m;
  }
  ++state.step;
  adam_update_tensor<S>(params.w1, grads.w1, state.m[0], state.v[0], state.step, cfg);
  adam_update_tensor<S>(params.b1, grads.b1, state.m[1], state.v[1], state.step, cfg);
  adam_update_tensor<S>(params.w2, grads.w2, state.m[2], state.v[2], state.step, cfg);
  adam_update_tensor<S>(params.b2, grads.b2, state.m[3], state.v[3], state.step, cfg);
  adam_update_tensor<S>(params.w3, grads.w3, state.m[4], state.v[4], state.step, cfg);
  adam_update_tensor<S>(params.b3, grads.b3, state.m[5], state.v[5], state.step, cfg);
}

using MlpParams = MlpParamsT<Real>;
using HeadOutputs = HeadOutputsT<Real>;
using MlpCache = MlpCacheT<Real>;
using MlpGrads = MlpGradsT<Real>;
using AdamState = AdamStateT<Real>;

}  // namespace lsnif
