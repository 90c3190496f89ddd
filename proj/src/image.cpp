#include "lsnif/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lsnif {

void write_pfm(const Image& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open image file for writing: " + path);
  out << "PF\n" << image.width << " " << image.height << "\n-1.0\n";
  for (int y = image.height - 1; y >= 0; --y) {
    for (int x = 0; x < image.width; ++x) {
      const Vec3& p = image.at(x, y);
      float rgb[3] = {p.x(), p.y(), p.z()};
      out.write(reinterpret_cast<const char*>(rgb), sizeof rgb);
    }
  }
  if (!out) throw std::runtime_error("failed writing image file: " + path);
}

Image read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image file: " + path);
  std::string magic;
  int width, height;
  float scale;
  in >> magic >> width >> height >> scale;
  if (magic != "PF") throw std::runtime_error("not a color PFM file: " + path);
  if (scale >= 0) throw std::runtime_error("big-endian PFM not supported: " + path);
  in.get();  // single whitespace after the header
  Image image(width, height);
  for (int y = height - 1; y >= 0; --y) {
    for (int x = 0; x < width; ++x) {
      float rgb[3];
      if (!in.read(reinterpret_cast<char*>(rgb), sizeof rgb))
        throw std::runtime_error("PFM file truncated: " + path);
      image.at(x, y) = Vec3(rgb[0], rgb[1], rgb[2]);
    }
  }
  return image;
}

void write_ppm(const Image& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open image file for writing: " + path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Vec3& p = image.at(x, y);
      unsigned char rgb[3];
      for (int c = 0; c < 3; ++c) {
        const Real v = std::pow(std::clamp(p[c], Real(0), Real(1)), Real(1.0 / 2.2));
        rgb[c] = static_cast<unsigned char>(std::lround(v * Real(255)));
      }
      out.write(reinterpret_cast<const char*>(rgb), 3);
    }
  }
  if (!out) throw std::runtime_error("failed writing image file: " + path);
}

}  // namespace lsnif
