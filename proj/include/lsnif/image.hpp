#pragma once

#include "lsnif/types.hpp"

#include <string>
#include <vector>

namespace lsnif {

// Linear RGB image, row 0 at the top.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Vec3> pixels;

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h, Vec3::Zero()) {}
  Vec3& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  const Vec3& at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

// PFM: binary "PF", little-endian (negative scale), bottom row first.
void write_pfm(const Image& image, const std::string& path);
Image read_pfm(const std::string& path);

// PPM: 8-bit binary P6 after gamma 2.2.
void write_ppm(const Image& image, const std::string& path);

}  // namespace lsnif
