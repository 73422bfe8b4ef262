#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "viewdrift/surrogate/features.hpp"

namespace viewdrift::surrogate {

struct DetectorParams {
  std::uint64_t seed = 42;
  double kappa = 1.5;        // BEV center perturbation bound, m
  double yaw_scale = 0.4;    // rad
  double dim_scale = 0.4;    // m
  double mix_scale = 1.0;    // feature mixing scale ahead of the hidden tanh
  double gain = 8.0;         // output weight scale
  double accept_mid = 0.2;   // confidence where the score gate is half open
  double accept_width = 0.1; // softness of the score gate
};

inline constexpr int kHidden = 16;
inline constexpr int kOutputs = 7;  // dx, dy, dyaw, dl, dw, dh, dconf

// Frozen two-layer response head, no biases: zero features map to exactly
// the clean box. Weights are a pure function of the seed.
struct SurrogateDetector {
  DetectorParams params;
  Eigen::Matrix<double, kHidden, 24> w1;
  Eigen::Matrix<double, kOutputs, kHidden> w2;

  explicit SurrogateDetector(const DetectorParams& p = {});
};

// Bounded perturbation of the clean box:
//   planar shift    kappa * tanh(|g|)/|g| * g      (norm <= kappa)
//   yaw, dims       scale * tanh(raw)
//   confidence      conf * (1 - tanh(raw)^2)       (smooth drop, stays in (0, conf])
// The emitted geometry is the clean box blended toward the perturbed one by a
// sigmoid score gate in the attacked confidence: detections the downstream
// consumer would score-filter away lose their geometric displacement too.
scene::DetectionBox detect(const scene::DetectionBox& clean, const FeatureVector& feats,
                           const SurrogateDetector& det);

struct DetectGradient {
  // d(perturbation_i)/d(feature_j), rows in kOutputs order. The perturbation
  // channels are (dx, dy, dyaw, dl, dw, dh, dconf).
  Eigen::Matrix<double, kOutputs, 24> d_out_d_feat;
};

std::pair<scene::DetectionBox, DetectGradient> detect_with_gradient(
    const scene::DetectionBox& clean, const FeatureVector& feats, const SurrogateDetector& det);

// Gradient of one perturbation channel w.r.t. every texture pixel, through
// the pooling chain. grad is resized to h*w*3.
std::vector<double> output_pixel_gradient(const DetectGradient& dg, int output_index,
                                          const Texture& tex, const FaceAtlas& atlas,
                                          const ViewContext& ctx);

}  // namespace viewdrift::surrogate
