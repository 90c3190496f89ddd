#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>

namespace lsnif {

using Real = float;
using Vec3 = Eigen::Matrix<Real, 3, 1>;
using Vec3i = Eigen::Matrix<int, 3, 1>;
using Affine = Eigen::Transform<Real, 3, Eigen::Affine>;

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using Vec3T = Eigen::Matrix<S, 3, 1>;

// splitmix64 finalizer; used to derive independent RNG seeds from
// (base seed, stream id...) tuples so worker/pixel/sample streams
// never overlap.
inline std::uint64_t mix_bits(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint32_t seed_stream(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix_bits(seed + 0x632be59bd9b4e019ull);
  h = mix_bits(h ^ a);
  h = mix_bits(h ^ b);
  h = mix_bits(h ^ c);
  return static_cast<std::uint32_t>(h >> 32);
}

}  // namespace lsnif
