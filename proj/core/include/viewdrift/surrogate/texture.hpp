#pragma once
#include <string>
#include <vector>

#include "viewdrift/errors.hpp"

namespace viewdrift::surrogate {

// RGB camouflage wrap, row-major, channels interleaved. Values live in [0,1]
// and are kept exactly float32-representable (the optimizer snaps through
// float after every projection), so the binary sidecar round-trips exactly.
struct Texture {
  int h = 0;
  int w = 0;
  std::vector<double> data;  // h * w * 3

  Texture() = default;
  Texture(int height, int width, double fill = 0.0);

  double& at(int r, int c, int ch) { return data[(static_cast<std::size_t>(r) * w + c) * 3 + ch]; }
  double at(int r, int c, int ch) const {
    return data[(static_cast<std::size_t>(r) * w + c) * 3 + ch];
  }
  std::size_t size() const { return data.size(); }
};

// Clamp into [0,1], then snap each value through float32.
void project_unit(Texture& tex);

// 8-bit preview; lossy by design.
void write_ppm(const std::string& path, const Texture& tex);
Texture read_ppm(const std::string& path);

// Lossless sidecar: 16-byte header (8-byte magic "VDTEXF32", u32 h, u32 w,
// little-endian) followed by h*w*3 float32 values.
void write_sidecar(const std::string& path, const Texture& tex);
Texture read_sidecar(const std::string& path);

}  // namespace viewdrift::surrogate
