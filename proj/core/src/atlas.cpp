#include "viewdrift/surrogate/atlas.hpp"

#include <algorithm>
#include <cmath>

#include "viewdrift/scene/geometry.hpp"

namespace viewdrift::surrogate {

namespace {

// Masked zones as fractions of the paintable rect.
constexpr double kWindowTop = 0.08, kWindowBottom = 0.32;
constexpr double kWheelXa = 0.22, kWheelXb = 0.78, kWheelY = 0.92, kWheelR = 0.16;
constexpr double kMirrorTop = 0.32, kMirrorBottom = 0.45, kMirrorWidth = 0.08;

FaceRegion make_region(int tex_w, int qr0, int qc0, int qrows, int qcols, double aspect,
                       bool side_face) {
  FaceRegion reg;
  // Largest centered rect with cols:rows == aspect.
  int rows = qrows;
  int cols = static_cast<int>(std::lround(rows * aspect));
  if (cols > qcols) {
    cols = qcols;
    rows = std::max(1, static_cast<int>(std::lround(cols / aspect)));
  }
  cols = std::max(1, cols);
  reg.rows = rows;
  reg.cols = cols;
  reg.r0 = qr0 + (qrows - rows) / 2;
  reg.c0 = qc0 + (qcols - cols) / 2;
  reg.attach.assign(static_cast<std::size_t>(rows) * cols, 1);

  auto exclude = [&](int r, int c) { reg.attach[static_cast<std::size_t>(r) * cols + c] = 0; };
  for (int r = 0; r < rows; ++r) {
    const double yf = (r + 0.5) / rows;
    for (int c = 0; c < cols; ++c) {
      const double xf = (c + 0.5) / cols;
      if (yf >= kWindowTop && yf < kWindowBottom) exclude(r, c);
      if (side_face) {
        // Wheel disks, measured in row units so they stay round on screen.
        const double dya = yf - kWheelY;
        const double ax = (xf - kWheelXa) * cols / static_cast<double>(rows);
        const double bx = (xf - kWheelXb) * cols / static_cast<double>(rows);
        if (ax * ax + dya * dya < kWheelR * kWheelR || bx * bx + dya * dya < kWheelR * kWheelR)
          exclude(r, c);
      } else {
        if (yf >= kMirrorTop && yf < kMirrorBottom && (xf < kMirrorWidth || xf >= 1.0 - kMirrorWidth))
          exclude(r, c);
      }
    }
  }

  // Pooling support.
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (!reg.attached(r, c)) continue;
      reg.pix.push_back((reg.r0 + r) * tex_w + (reg.c0 + c));
      reg.xn.push_back((c + 0.5) / cols - 0.5);
      reg.yn.push_back((r + 0.5) / rows - 0.5);
    }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (!reg.attached(r, c)) continue;
      const int flat = (reg.r0 + r) * tex_w + (reg.c0 + c);
      if (c + 1 < cols && reg.attached(r, c + 1)) reg.pairs.emplace_back(flat, flat + 1);
      if (r + 1 < rows && reg.attached(r + 1, c)) reg.pairs.emplace_back(flat, flat + tex_w);
    }
  return reg;
}

}  // namespace

FaceAtlas FaceAtlas::build(int tex_h, int tex_w, const scene::VehicleSpec& spec) {
  if (tex_h < 16 || tex_w < 16) throw InvalidInput("texture atlas wants at least 16x16");
  if (!(spec.length > 0.0 && spec.width > 0.0 && spec.height > 0.0))
    throw InvalidInput("vehicle dims must be positive");

  FaceAtlas atlas;
  atlas.tex_h = tex_h;
  atlas.tex_w = tex_w;
  const int qh = tex_h / 2;
  const int qw = tex_w / 2;
  const double end_aspect = spec.width / spec.height;   // front, rear
  const double side_aspect = spec.length / spec.height; // left, right

  atlas.faces[scene::kFaceFront] = make_region(tex_w, 0, 0, qh, qw, end_aspect, false);
  atlas.faces[scene::kFaceRear] = make_region(tex_w, 0, qw, qh, qw, end_aspect, false);
  atlas.faces[scene::kFaceLeft] = make_region(tex_w, qh, 0, qh, qw, side_aspect, true);
  atlas.faces[scene::kFaceRight] = make_region(tex_w, qh, qw, qh, qw, side_aspect, true);

  for (const FaceRegion& reg : atlas.faces)
    if (reg.pix.empty()) throw InvalidInput("atlas face has no paintable pixels");
  return atlas;
}

Texture remap(const Texture& src, const FaceAtlas& src_atlas, const FaceAtlas& dst_atlas) {
  if (src.h != src_atlas.tex_h || src.w != src_atlas.tex_w)
    throw InvalidInput("texture does not match source atlas");
  Texture dst(dst_atlas.tex_h, dst_atlas.tex_w, 0.5);
  for (int f = 0; f < 4; ++f) {
    const FaceRegion& s = src_atlas.faces[f];
    const FaceRegion& d = dst_atlas.faces[f];
    for (int r = 0; r < d.rows; ++r) {
      const double v = (r + 0.5) / d.rows;
      for (int c = 0; c < d.cols; ++c) {
        const double u = (c + 0.5) / d.cols;
        // Bilinear sample of the source rect at (u, v).
        const double sx = u * s.cols - 0.5;
        const double sy = v * s.rows - 0.5;
        const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, s.cols - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, s.rows - 1);
        const int x1 = std::min(x0 + 1, s.cols - 1);
        const int y1 = std::min(y0 + 1, s.rows - 1);
        const double fx = std::clamp(sx - x0, 0.0, 1.0);
        const double fy = std::clamp(sy - y0, 0.0, 1.0);
        for (int ch = 0; ch < 3; ++ch) {
          const double v00 = src.at(s.r0 + y0, s.c0 + x0, ch);
          const double v01 = src.at(s.r0 + y0, s.c0 + x1, ch);
          const double v10 = src.at(s.r0 + y1, s.c0 + x0, ch);
          const double v11 = src.at(s.r0 + y1, s.c0 + x1, ch);
          dst.at(d.r0 + r, d.c0 + c, ch) = (1 - fy) * ((1 - fx) * v00 + fx * v01) +
                                           fy * ((1 - fx) * v10 + fx * v11);
        }
      }
    }
  }
  project_unit(dst);
  return dst;
}

}  // namespace viewdrift::surrogate
