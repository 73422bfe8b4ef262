#pragma once
#include "viewdrift/rng.hpp"
#include "viewdrift/scene/types.hpp"

namespace viewdrift::surrogate {

// Pose/appearance jitter ranges, all symmetric around the identity.
struct EotRanges {
  double yaw = 0.05;         // +- rad
  double translation = 0.25; // +- m, each axis
  double depth = 0.07;       // ratio drawn from [1 - depth, 1 + depth]
  double scale = 0.04;       // body scale from [1 - scale, 1 + scale]
};

struct EotSample {
  double yaw_jitter = 0.0;
  double tx = 0.0, ty = 0.0;
  double depth_ratio = 1.0;
  double scale = 1.0;
};

EotSample sample_eot(const EotRanges& ranges, Rng& rng);

// Jitters the target pose: yaw and translation first, then the distance to
// the ego scaled by depth_ratio along the ego->target ray.
scene::FrameState apply_eot(const scene::FrameState& frame, const EotSample& s);
scene::VehicleSpec apply_eot(const scene::VehicleSpec& spec, const EotSample& s);

}  // namespace viewdrift::surrogate
