#pragma once
#include <array>
#include <vector>

#include "viewdrift/scene/types.hpp"
#include "viewdrift/surrogate/texture.hpp"

namespace viewdrift::attack {

struct LossWeights {
  double move = 1.0;
  double prog = 1.0;  // lambda
  double fid = 0.5;
  double tv = 0.1;
  double nps = 0.05;
};

// The box properties fidelity must preserve; yaw differences are wrapped.
struct FidelityVector {
  double confidence = 1.0;
  double l = 0.0, w = 0.0, h = 0.0;
  double yaw = 0.0;
};

FidelityVector fidelity(const scene::DetectionBox& det);

// Normalizers for the fidelity distance: confidence 1.0, dims 1.0 m, yaw 0.5 rad.
inline constexpr double kFidConfScale = 1.0;
inline constexpr double kFidDimScale = 1.0;
inline constexpr double kFidYawScale = 0.5;

// Wants every per-frame displacement large: -sum(d_k).
double loss_move(const std::vector<double>& d);

// Penalizes increments that miss the target step: sum((d_{k+1}-d_k-sbar)^2).
double loss_prog(const std::vector<double>& d, double sbar);

// Scale-normalized L2 distance between attacked and clean fidelity vectors.
double loss_fid(const FidelityVector& attacked, const FidelityVector& clean);

// Mean squared 4-neighbor difference over all channels.
double loss_tv(const surrogate::Texture& tex);
void loss_tv_backward(const surrogate::Texture& tex, double weight, std::vector<double>& grad);

using Palette = std::vector<std::array<double, 3>>;

// Twelve saturated hues plus black, white and mid gray.
Palette default_palette();

// Mean over pixels of the distance to the nearest palette color.
double loss_nps(const surrogate::Texture& tex, const Palette& palette);
void loss_nps_backward(const surrogate::Texture& tex, const Palette& palette, double weight,
                       std::vector<double>& grad);

}  // namespace viewdrift::attack
