#pragma once

#include "lsnif/types.hpp"

#include <cmath>
#include <random>

namespace lsnif {

using Rng = std::mt19937;

inline Real uniform_real(Rng& rng) {
  return std::uniform_real_distribution<Real>(Real(0), Real(1))(rng);
}

// Branchless ONB from a unit vector (Duff et al., "Building an Orthonormal
// Basis, Revisited").
inline void orthonormal_basis(const Vec3& n, Vec3& tangent, Vec3& bitangent) {
  const Real sign = std::copysign(Real(1), n.z());
  const Real a = Real(-1) / (sign + n.z());
  const Real b = n.x() * n.y() * a;
  tangent = Vec3(Real(1) + sign * n.x() * n.x() * a, sign * b, -sign * n.x());
  bitangent = Vec3(b, sign + n.y() * n.y() * a, -n.y());
}

inline Vec3 uniform_sphere_dir(Rng& rng) {
  const Real z = Real(1) - Real(2) * uniform_real(rng);
  const Real r = std::sqrt(std::max(Real(0), Real(1) - z * z));
  const Real phi = Real(2) * Real(M_PI) * uniform_real(rng);
  return Vec3(r * std::cos(phi), r * std::sin(phi), z);
}

// Cosine-weighted hemisphere direction about the unit axis, via the
// concentric-free polar map (pdf = cos(theta) / pi).
inline Vec3 cosine_hemisphere_dir(const Vec3& axis, Rng& rng) {
  const Real u1 = uniform_real(rng);
  const Real u2 = uniform_real(rng);
  const Real r = std::sqrt(u1);
  const Real phi = Real(2) * Real(M_PI) * u2;
  const Real x = r * std::cos(phi);
  const Real y = r * std::sin(phi);
  const Real z = std::sqrt(std::max(Real(0), Real(1) - u1));
  Vec3 t, b;
  orthonormal_basis(axis, t, b);
  return (x * t + y * b + z * axis).normalized();
}

}  // namespace lsnif
