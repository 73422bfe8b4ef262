#include "viewdrift/attack/losses.hpp"

#include <cmath>
#include <limits>

#include "viewdrift/scene/geometry.hpp"

namespace viewdrift::attack {

FidelityVector fidelity(const scene::DetectionBox& det) {
  FidelityVector v;
  v.confidence = det.confidence;
  v.l = det.box.l;
  v.w = det.box.w;
  v.h = det.box.h;
  v.yaw = det.box.yaw;
  return v;
}

double loss_move(const std::vector<double>& d) {
  if (d.empty()) throw InvalidInput("empty displacement list");
  double sum = 0.0;
  for (double v : d) sum += v;
  return -sum;
}

double loss_prog(const std::vector<double>& d, double sbar) {
  if (d.size() < 2) throw InvalidInput("need at least two displacements");
  if (!(sbar >= 0.0)) throw InvalidInput("sbar must be >= 0");
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    const double r = d[k + 1] - d[k] - sbar;
    sum += r * r;
  }
  return sum;
}

double loss_fid(const FidelityVector& attacked, const FidelityVector& clean) {
  const double dc = (attacked.confidence - clean.confidence) / kFidConfScale;
  const double dl = (attacked.l - clean.l) / kFidDimScale;
  const double dw = (attacked.w - clean.w) / kFidDimScale;
  const double dh = (attacked.h - clean.h) / kFidDimScale;
  const double dy = scene::wrap_angle(attacked.yaw - clean.yaw) / kFidYawScale;
  return std::sqrt(dc * dc + dl * dl + dw * dw + dh * dh + dy * dy);
}

double loss_tv(const surrogate::Texture& tex) {
  if (tex.h < 1 || tex.w < 1) throw InvalidInput("empty texture");
  const std::size_t pairs =
      3 * (static_cast<std::size_t>(tex.h) * (tex.w - 1) + static_cast<std::size_t>(tex.h - 1) * tex.w);
  if (pairs == 0) return 0.0;
  double sum = 0.0;
  for (int r = 0; r < tex.h; ++r)
    for (int c = 0; c < tex.w; ++c)
      for (int ch = 0; ch < 3; ++ch) {
        const double v = tex.at(r, c, ch);
        if (c + 1 < tex.w) {
          const double d = v - tex.at(r, c + 1, ch);
          sum += d * d;
        }
        if (r + 1 < tex.h) {
          const double d = v - tex.at(r + 1, c, ch);
          sum += d * d;
        }
      }
  return sum / static_cast<double>(pairs);
}

void loss_tv_backward(const surrogate::Texture& tex, double weight, std::vector<double>& grad) {
  if (grad.size() != tex.data.size()) throw InvalidInput("gradient buffer size mismatch");
  const std::size_t pairs =
      3 * (static_cast<std::size_t>(tex.h) * (tex.w - 1) + static_cast<std::size_t>(tex.h - 1) * tex.w);
  if (pairs == 0) return;
  const double scale = weight * 2.0 / static_cast<double>(pairs);
  auto idx = [&](int r, int c, int ch) {
    return (static_cast<std::size_t>(r) * tex.w + c) * 3 + static_cast<std::size_t>(ch);
  };
  for (int r = 0; r < tex.h; ++r)
    for (int c = 0; c < tex.w; ++c)
      for (int ch = 0; ch < 3; ++ch) {
        const double v = tex.at(r, c, ch);
        if (c + 1 < tex.w) {
          const double d = scale * (v - tex.at(r, c + 1, ch));
          grad[idx(r, c, ch)] += d;
          grad[idx(r, c + 1, ch)] -= d;
        }
        if (r + 1 < tex.h) {
          const double d = scale * (v - tex.at(r + 1, c, ch));
          grad[idx(r, c, ch)] += d;
          grad[idx(r + 1, c, ch)] -= d;
        }
      }
}

Palette default_palette() {
  Palette p;
  // Hues every 30 degrees at full saturation and value.
  for (int i = 0; i < 12; ++i) {
    const double h = i / 2.0;  // sector in [0, 6)
    const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
    double r = 0, g = 0, b = 0;
    switch (i / 2) {
      case 0: r = 1; g = x; break;
      case 1: r = x; g = 1; break;
      case 2: g = 1; b = x; break;
      case 3: g = x; b = 1; break;
      case 4: r = x; b = 1; break;
      default: r = 1; b = x; break;
    }
    p.push_back({r, g, b});
  }
  p.push_back({0.0, 0.0, 0.0});
  p.push_back({1.0, 1.0, 1.0});
  p.push_back({0.5, 0.5, 0.5});
  return p;
}

namespace {

// Index of the closest palette color; first wins ties.
std::size_t nearest_color(const Palette& palette, double r, double g, double b, double* dist) {
  std::size_t best = 0;
  double best2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < palette.size(); ++i) {
    const double dr = r - palette[i][0];
    const double dg = g - palette[i][1];
    const double db = b - palette[i][2];
    const double d2 = dr * dr + dg * dg + db * db;
    if (d2 < best2) {
      best2 = d2;
      best = i;
    }
  }
  if (dist) *dist = std::sqrt(best2);
  return best;
}

}  // namespace

double loss_nps(const surrogate::Texture& tex, const Palette& palette) {
  if (palette.empty()) throw InvalidInput("empty palette");
  const std::size_t n = static_cast<std::size_t>(tex.h) * tex.w;
  if (n == 0) throw InvalidInput("empty texture");
  double sum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    double d = 0.0;
    nearest_color(palette, tex.data[p * 3], tex.data[p * 3 + 1], tex.data[p * 3 + 2], &d);
    sum += d;
  }
  return sum / static_cast<double>(n);
}

void loss_nps_backward(const surrogate::Texture& tex, const Palette& palette, double weight,
                       std::vector<double>& grad) {
  if (palette.empty()) throw InvalidInput("empty palette");
  if (grad.size() != tex.data.size()) throw InvalidInput("gradient buffer size mismatch");
  const std::size_t n = static_cast<std::size_t>(tex.h) * tex.w;
  const double scale = weight / static_cast<double>(n);
  for (std::size_t p = 0; p < n; ++p) {
    double d = 0.0;
    const std::size_t i =
        nearest_color(palette, tex.data[p * 3], tex.data[p * 3 + 1], tex.data[p * 3 + 2], &d);
    if (d <= 0.0) continue;  // exactly on a palette color: flat spot
    for (int ch = 0; ch < 3; ++ch)
      grad[p * 3 + ch] += scale * (tex.data[p * 3 + ch] - palette[i][ch]) / d;
  }
}

}  // namespace viewdrift::attack
