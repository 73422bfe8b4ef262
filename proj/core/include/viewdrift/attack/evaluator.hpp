#pragma once
#include <vector>

#include "viewdrift/attack/losses.hpp"
#include "viewdrift/attack/target.hpp"
#include "viewdrift/surrogate/detector.hpp"
#include "viewdrift/surrogate/eot.hpp"

namespace viewdrift::attack {

struct EvalParams {
  double temporal_adapt = 0.4;    // eta: strength of the static-appearance rejection
  double reference_area = 1.2e4;  // px^2 that saturates the area factor
  double smear_coeff = 0.12;      // motion blur per m/s of relative speed
};

struct FrameEval {
  surrogate::ViewContext ctx;
  surrogate::FeatureVector raw{};      // pooled wrap statistics
  surrogate::FeatureVector adapted{};  // after the high-pass across the window
  scene::DetectionBox prior;           // geometric box the response head perturbs
  scene::DetectionBox detection;
};

struct SequenceEval {
  std::vector<FrameEval> frames;

  std::vector<scene::DetectionBox> detections() const;
  std::vector<std::array<double, 2>> centers() const;
};

// View/absorption context for one frame; off-screen targets read area 0.
surrogate::ViewContext frame_context(const scene::FrameState& frame,
                                     const scene::VehicleSpec& spec,
                                     const scene::CameraModel& camera, const EvalParams& params);

// Full forward pass over a frame window. A temporal-fusion victim adapts to
// appearance that stays constant across the window, so the features are
// high-passed before the response head:
//   adapted_k = raw_k - eta * mean_j(raw_j)
// A wrap that reads identically from every angle keeps only (1 - eta) of its
// leverage; view-dependent structure passes through at full strength.
SequenceEval evaluate_sequence(const surrogate::Texture& tex, const surrogate::FaceAtlas& atlas,
                               const scene::ScenarioSequence& seq,
                               const surrogate::SurrogateDetector& det, const EvalParams& params,
                               const surrogate::EotSample* eot = nullptr);

// Per-frame drift of the attacked center along u, against the clean pass.
std::vector<double> displacement_series(const SequenceEval& clean, const SequenceEval& attacked,
                                        const std::array<double, 2>& u);

// Scene-dependent part of the objective (move + prog + fid).
struct SceneLoss {
  double total = 0.0;  // weights applied
  double move = 0.0;
  double prog = 0.0;
  double fid = 0.0;  // mean over frames
  std::vector<double> displacements;
};

SceneLoss scene_loss(const SequenceEval& clean, const SequenceEval& attacked,
                     const AttackTarget& target, const LossWeights& weights);

// Same value, plus d(total)/d(pixel) accumulated into grad (allocated to the
// texture size when passed empty). Runs its own forward pass under eot; clean
// must have been evaluated under the same transform.
SceneLoss scene_loss_grad(const surrogate::Texture& tex, const surrogate::FaceAtlas& atlas,
                          const scene::ScenarioSequence& seq,
                          const surrogate::SurrogateDetector& det, const EvalParams& params,
                          const surrogate::EotSample* eot, const SequenceEval& clean,
                          const AttackTarget& target, const LossWeights& weights,
                          std::vector<double>& grad);

// Texture-only regularizers (tv + nps).
struct TextureLoss {
  double total = 0.0;  // weights applied
  double tv = 0.0;
  double nps = 0.0;
};

TextureLoss texture_loss(const surrogate::Texture& tex, const Palette& palette,
                         const LossWeights& weights);
TextureLoss texture_loss_grad(const surrogate::Texture& tex, const Palette& palette,
                              const LossWeights& weights, std::vector<double>& grad);

}  // namespace viewdrift::attack
