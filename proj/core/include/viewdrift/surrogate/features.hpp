#pragma once
#include <array>

#include "viewdrift/scene/geometry.hpp"
#include "viewdrift/surrogate/atlas.hpp"

namespace viewdrift::surrogate {

// Six per-face statistics x four faces, face-major:
// [meanR, meanG, meanB, gradient energy, horizontal moment, vertical moment].
using FeatureVector = std::array<double, 24>;
inline constexpr int kStatsPerFace = 6;

struct ViewContext {
  scene::FaceWeights visibility{};  // from face_visibility
  double view = 0.0;                // aspect angle, rad
  double illumination = 1.0;
  double area_factor = 1.0;  // projected area / reference, clamped to [0,1]
  double sharpness = 1.0;    // motion smear attenuation, (0,1]
};

// Per-face statistics over the paintable pixels, each scaled by
// visibility * illumination * area_factor * sharpness. Pixels are weighted
// by a view lobe that slides across the face with the camera azimuth, so
// different texture columns dominate the stats as the aspect sweeps; that
// is what lets a static wrap read differently from frame to frame.
FeatureVector pool_features(const Texture& tex, const FaceAtlas& atlas, const ViewContext& ctx);

// Contract-shaped convenience overload (sharpness = 1).
FeatureVector pool_features(const Texture& tex, const FaceAtlas& atlas,
                            const scene::FaceWeights& visibility, double view,
                            double illumination, double area_factor);

// Accumulates d(loss)/d(pixel) into grad (size h*w*3) given d(loss)/d(feature).
void pool_backward(const Texture& tex, const FaceAtlas& atlas, const ViewContext& ctx,
                   const FeatureVector& dfeat, std::vector<double>& grad);

}  // namespace viewdrift::surrogate
