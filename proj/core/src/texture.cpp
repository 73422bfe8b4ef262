#include "viewdrift/surrogate/texture.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "texture sidecar IO assumes a little-endian host");

namespace viewdrift::surrogate {

namespace {
constexpr char kMagic[8] = {'V', 'D', 'T', 'E', 'X', 'F', '3', '2'};
}

Texture::Texture(int height, int width, double fill)
    : h(height), w(width), data(static_cast<std::size_t>(height) * width * 3, fill) {
  if (height <= 0 || width <= 0) throw InvalidInput("texture dims must be positive");
}

void project_unit(Texture& tex) {
  for (double& v : tex.data) {
    v = static_cast<double>(static_cast<float>(std::clamp(v, 0.0, 1.0)));
  }
}

void write_ppm(const std::string& path, const Texture& tex) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << "P6\n" << tex.w << ' ' << tex.h << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(tex.w) * 3);
  for (int r = 0; r < tex.h; ++r) {
    for (int c = 0; c < tex.w; ++c)
      for (int ch = 0; ch < 3; ++ch)
        row[static_cast<std::size_t>(c) * 3 + ch] = static_cast<unsigned char>(
            std::lround(std::clamp(tex.at(r, c, ch), 0.0, 1.0) * 255.0));
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

Texture read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw InvalidInput("not a P6 pixmap: " + path);
  int w = 0, h = 0, maxval = 0;
  in >> w >> h >> maxval;
  if (w <= 0 || h <= 0 || maxval != 255) throw InvalidInput("unsupported pixmap header");
  in.get();  // single whitespace after maxval
  Texture tex(h, w);
  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * 3);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) throw InvalidInput("truncated pixmap: " + path);
  for (std::size_t i = 0; i < buf.size(); ++i)
    tex.data[i] = static_cast<double>(static_cast<float>(buf[i] / 255.0f));
  return tex;
}

void write_sidecar(const std::string& path, const Texture& tex) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out.write(kMagic, 8);
  const std::uint32_t h = static_cast<std::uint32_t>(tex.h);
  const std::uint32_t w = static_cast<std::uint32_t>(tex.w);
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  std::vector<float> buf(tex.data.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(tex.data[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

Texture read_sidecar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw InvalidInput("bad sidecar magic: " + path);
  std::uint32_t h = 0, w = 0;
  in.read(reinterpret_cast<char*>(&h), 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  if (!in || h == 0 || w == 0 || h > 1u << 15 || w > 1u << 15)
    throw InvalidInput("bad sidecar dims: " + path);
  Texture tex(static_cast<int>(h), static_cast<int>(w));
  std::vector<float> buf(tex.data.size());
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!in) throw InvalidInput("truncated sidecar: " + path);
  for (std::size_t i = 0; i < buf.size(); ++i) tex.data[i] = static_cast<double>(buf[i]);
  return tex;
}

}  // namespace viewdrift::surrogate
