#pragma once

#include <cstdint>
#include <cstring>

namespace lsnif {

// IEEE 754 binary16 conversions, round-to-nearest-even on the way down.

inline std::uint16_t float_to_half(float value) {
  std::uint32_t x;
  std::memcpy(&x, &value, 4);
  const std::uint16_t sign = static_cast<std::uint16_t>((x >> 16) & 0x8000u);
  const std::uint32_t exp_bits = (x >> 23) & 0xffu;
  std::uint32_t man = x & 0x7fffffu;

  if (exp_bits == 0xffu)  // inf / nan
    return static_cast<std::uint16_t>(sign | 0x7c00u | (man ? 0x200u : 0u));

  const int exp = static_cast<int>(exp_bits) - 127 + 15;
  if (exp >= 31) return static_cast<std::uint16_t>(sign | 0x7c00u);  // overflow
  if (exp <= 0) {
    if (exp < -10) return sign;  // underflows to zero
    man |= 0x800000u;
    const std::uint32_t shift = static_cast<std::uint32_t>(14 - exp);
    std::uint32_t half_man = man >> shift;
    const std::uint32_t rem = man & ((1u << shift) - 1u);
    const std::uint32_t halfway = 1u << (shift - 1);
    if (rem > halfway || (rem == halfway && (half_man & 1u))) ++half_man;
    return static_cast<std::uint16_t>(sign | half_man);
  }
  std::uint16_t h =
      static_cast<std::uint16_t>(sign | (exp << 10) | (man >> 13));
  const std::uint32_t rem = man & 0x1fffu;
  if (rem > 0x1000u || (rem == 0x1000u && (h & 1u))) ++h;  // may carry into exp
  return h;
}

inline float half_to_float(std::uint16_t h) {
  const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
  const std::uint32_t exp = (h >> 10) & 0x1fu;
  std::uint32_t man = h & 0x3ffu;
  std::uint32_t x;
  if (exp == 0) {
    if (man == 0) {
      x = sign;
    } else {
      int shift = 0;
      while (!(man & 0x400u)) {
        man <<= 1;
        ++shift;
      }
      man &= 0x3ffu;
      x = sign | static_cast<std::uint32_t>(113 - shift) << 23 | (man << 13);
    }
  } else if (exp == 31) {
    x = sign | 0x7f800000u | (man << 13);
  } else {
    x = sign | ((exp - 15 + 127) << 23) | (man << 13);
  }
  float out;
  std::memcpy(&out, &x, 4);
  return out;
}

}  // namespace lsnif
