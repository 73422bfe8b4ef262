#include "viewdrift/surrogate/features.hpp"

#include <cmath>

namespace viewdrift::surrogate {

namespace {

// Face normal azimuths in the target body frame.
constexpr std::array<double, 4> kFaceAzimuth{0.0, M_PI, M_PI / 2.0, -M_PI / 2.0};

// Sliding view lobe: foreshortening and glancing reflection concentrate the
// camera's sampling of a face around one strip, and that strip slides across
// the face as the aspect changes. Spread maps the normalized face coordinate
// onto the lobe phase; width sets how selective the strip is. Their ratio
// fixes how much of a face the lobe crosses per radian of aspect sweep.
constexpr double kLobeSpread = 1.4;
constexpr double kLobeWidth = 0.15;

double lobe_weight(double az_rel, double xn) {
  const double ph = (az_rel + kLobeSpread * xn) / kLobeWidth;
  return std::exp(-0.5 * ph * ph);
}

void check(const Texture& tex, const FaceAtlas& atlas, const ViewContext& ctx) {
  if (tex.h != atlas.tex_h || tex.w != atlas.tex_w)
    throw InvalidInput("texture does not match atlas dims");
  if (ctx.illumination < 0.0 || ctx.illumination > 1.0)
    throw InvalidInput("illumination outside [0,1]");
  if (ctx.area_factor < 0.0 || ctx.area_factor > 1.0)
    throw InvalidInput("area_factor outside [0,1]");
  if (!(ctx.sharpness > 0.0) || ctx.sharpness > 1.0)
    throw InvalidInput("sharpness outside (0,1]");
  for (double v : ctx.visibility)
    if (v < 0.0 || v > 1.0) throw InvalidInput("visibility weight outside [0,1]");
}

}  // namespace

FeatureVector pool_features(const Texture& tex, const FaceAtlas& atlas, const ViewContext& ctx) {
  check(tex, atlas, ctx);
  const double az = scene::wrap_angle(M_PI - ctx.view);
  FeatureVector feats{};
  for (int f = 0; f < 4; ++f) {
    const double mult =
        ctx.visibility[f] * ctx.illumination * ctx.area_factor * ctx.sharpness;
    if (mult == 0.0) continue;
    const FaceRegion& reg = atlas.faces[f];
    const double az_rel = scene::wrap_angle(az - kFaceAzimuth[f]);

    double sw = 0.0, mr = 0.0, mg = 0.0, mb = 0.0, mh = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < reg.pix.size(); ++i) {
      const std::size_t base = static_cast<std::size_t>(reg.pix[i]) * 3;
      const double w = lobe_weight(az_rel, reg.xn[i]);
      const double r = tex.data[base], g = tex.data[base + 1], b = tex.data[base + 2];
      const double intensity = (r + g + b) / 3.0;
      sw += w;
      mr += w * r;
      mg += w * g;
      mb += w * b;
      mh += w * intensity * reg.xn[i];
      mv += w * intensity * reg.yn[i];
    }
    double energy = 0.0;
    for (const auto& [p, q] : reg.pairs) {
      const std::size_t bp = static_cast<std::size_t>(p) * 3;
      const std::size_t bq = static_cast<std::size_t>(q) * 3;
      const double ip = (tex.data[bp] + tex.data[bp + 1] + tex.data[bp + 2]) / 3.0;
      const double iq = (tex.data[bq] + tex.data[bq + 1] + tex.data[bq + 2]) / 3.0;
      energy += (ip - iq) * (ip - iq);
    }
    if (!reg.pairs.empty()) energy /= static_cast<double>(reg.pairs.size());

    double* out = feats.data() + f * kStatsPerFace;
    out[0] = mult * mr / sw;
    out[1] = mult * mg / sw;
    out[2] = mult * mb / sw;
    out[3] = mult * energy;
    out[4] = mult * mh / sw;
    out[5] = mult * mv / sw;
  }
  return feats;
}

FeatureVector pool_features(const Texture& tex, const FaceAtlas& atlas,
                            const scene::FaceWeights& visibility, double view,
                            double illumination, double area_factor) {
  ViewContext ctx;
  ctx.visibility = visibility;
  ctx.view = view;
  ctx.illumination = illumination;
  ctx.area_factor = area_factor;
  return pool_features(tex, atlas, ctx);
}

void pool_backward(const Texture& tex, const FaceAtlas& atlas, const ViewContext& ctx,
                   const FeatureVector& dfeat, std::vector<double>& grad) {
  check(tex, atlas, ctx);
  if (grad.size() != tex.data.size()) throw InvalidInput("gradient buffer size mismatch");
  const double az = scene::wrap_angle(M_PI - ctx.view);
  for (int f = 0; f < 4; ++f) {
    const double mult =
        ctx.visibility[f] * ctx.illumination * ctx.area_factor * ctx.sharpness;
    if (mult == 0.0) continue;
    const FaceRegion& reg = atlas.faces[f];
    const double az_rel = scene::wrap_angle(az - kFaceAzimuth[f]);
    const double* d = dfeat.data() + f * kStatsPerFace;

    double sw = 0.0;
    for (std::size_t i = 0; i < reg.pix.size(); ++i) sw += lobe_weight(az_rel, reg.xn[i]);

    for (std::size_t i = 0; i < reg.pix.size(); ++i) {
      const std::size_t base = static_cast<std::size_t>(reg.pix[i]) * 3;
      const double w = lobe_weight(az_rel, reg.xn[i]) * mult / sw;
      // Moments act on intensity, i.e. 1/3 per channel.
      const double dm = w * (d[4] * reg.xn[i] + d[5] * reg.yn[i]) / 3.0;
      grad[base] += w * d[0] + dm;
      grad[base + 1] += w * d[1] + dm;
      grad[base + 2] += w * d[2] + dm;
    }
    if (!reg.pairs.empty() && d[3] != 0.0) {
      const double scale = mult * d[3] * 2.0 / static_cast<double>(reg.pairs.size());
      for (const auto& [p, q] : reg.pairs) {
        const std::size_t bp = static_cast<std::size_t>(p) * 3;
        const std::size_t bq = static_cast<std::size_t>(q) * 3;
        const double ip = (tex.data[bp] + tex.data[bp + 1] + tex.data[bp + 2]) / 3.0;
        const double iq = (tex.data[bq] + tex.data[bq + 1] + tex.data[bq + 2]) / 3.0;
        const double g = scale * (ip - iq) / 3.0;
        grad[bp] += g;
        grad[bp + 1] += g;
        grad[bp + 2] += g;
        grad[bq] -= g;
        grad[bq + 1] -= g;
        grad[bq + 2] -= g;
      }
    }
  }
}

}  // namespace viewdrift::surrogate
