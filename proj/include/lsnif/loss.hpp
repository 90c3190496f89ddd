#pragma once

#include "lsnif/mlp.hpp"

#include <algorithm>
#include <cmath>

namespace lsnif {

template <typename S>
struct TargetT {
  bool occluded = false;
  S local_t = S(0);
  Vec3T<S> normal = Vec3T<S>::UnitZ();  // unit length
  Vec3T<S> albedo = Vec3T<S>::Zero();
  int material = 0;
};

template <typename S>
struct LossTermsT {
  S total = S(0);
  S occlusion_bce = S(0);
  S local_t_mae = S(0);
  S normal_cosine = S(0);
  S albedo_rel_l2 = S(0);
  S material_ce = S(0);

  void add(const LossTermsT& o) {
    total += o.total;
    occlusion_bce += o.occlusion_bce;
    local_t_mae += o.local_t_mae;
    normal_cosine += o.normal_cosine;
    albedo_rel_l2 += o.albedo_rel_l2;
    material_ce += o.material_ce;
  }
  void scale(S s) {
    total *= s;
    occlusion_bce *= s;
    local_t_mae *= s;
    normal_cosine *= s;
    albedo_rel_l2 *= s;
    material_ce *= s;
  }
};

inline constexpr double kProbClamp = 1e-7;   // keeps the BCE/CE logs finite
inline constexpr double kRelL2Stabilizer = 1e-2;

// Composite loss over one head-output column `p` (length 8 + n_mat) with
// unit term weights: BCE on occlusion always; MAE on local hit distance,
// cosine similarity on the normal, relative L2 on albedo and cross entropy
// on the material only when the reference says occluded. For unoccluded
// targets the masked heads receive exactly zero gradient.
template <typename S>
LossTermsT<S> composite_loss(const Eigen::Ref<const VecX<S>>& p,
                             const TargetT<S>& target, VecX<S>* dp_out) {
  LossTermsT<S> terms;
  if (dp_out) dp_out->setZero(p.size());

  // Occlusion: binary cross entropy on the sigmoid probability.
  {
    const S y = target.occluded ? S(1) : S(0);
    const S prob = std::clamp(p[kHeadOcclusion], S(kProbClamp), S(1) - S(kProbClamp));
    terms.occlusion_bce = -(y * std::log(prob) + (S(1) - y) * std::log(S(1) - prob));
    if (dp_out) (*dp_out)[kHeadOcclusion] = (prob - y) / (prob * (S(1) - prob));
  }

  if (target.occluded) {
    // Local hit distance: mean absolute error.
    {
      const S diff = p[kHeadLocalT] - target.local_t;
      terms.local_t_mae = std::abs(diff);
      if (dp_out) (*dp_out)[kHeadLocalT] = diff > S(0) ? S(1) : (diff < S(0) ? S(-1) : S(0));
    }
    // Normal: one minus cosine similarity against the unit reference.
    {
      const Vec3T<S> n = p.template segment<3>(kHeadNormal);
      const Vec3T<S> t = target.normal.normalized();
      const S len = std::max(n.norm(), S(1e-12));
      const S cos_sim = n.dot(t) / len;
      terms.normal_cosine = S(1) - cos_sim;
      if (dp_out)
        dp_out->template segment<3>(kHeadNormal) =
            -(t / len - (n.dot(t) / (len * len * len)) * n);
    }
    // Albedo: relative L2 normalized by the prediction.
    {
      for (int c = 0; c < 3; ++c) {
        const S a = p[kHeadAlbedo + c];
        const S t = target.albedo[c];
        const S denom = a * a + S(kRelL2Stabilizer);
        const S diff = a - t;
        terms.albedo_rel_l2 += diff * diff / denom;
        if (dp_out)
          (*dp_out)[kHeadAlbedo + c] =
              (S(2) * diff * denom - diff * diff * S(2) * a) / (denom * denom);
      }
    }
    // Material: categorical cross entropy on the softmax probabilities.
    {
      const S prob = std::clamp(p[kHeadMaterial + target.material], S(kProbClamp), S(1));
      terms.material_ce = -std::log(prob);
      if (dp_out) (*dp_out)[kHeadMaterial + target.material] = -S(1) / prob;
    }
  }

  terms.total = terms.occlusion_bce + terms.local_t_mae + terms.normal_cosine +
                terms.albedo_rel_l2 + terms.material_ce;
  return terms;
}

using Target = TargetT<Real>;
using LossTerms = LossTermsT<Real>;

}  // namespace lsnif
