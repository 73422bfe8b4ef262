#include "viewdrift/surrogate/eot.hpp"

#include "viewdrift/scene/geometry.hpp"

namespace viewdrift::surrogate {

EotSample sample_eot(const EotRanges& ranges, Rng& rng) {
  if (ranges.yaw < 0.0 || ranges.translation < 0.0 || ranges.depth < 0.0 || ranges.scale < 0.0)
    throw InvalidInput("eot ranges must be non-negative");
  if (ranges.depth >= 1.0 || ranges.scale >= 1.0)
    throw InvalidInput("eot ratio ranges must stay below 1");
  EotSample s;
  s.yaw_jitter = rng.uniform(-ranges.yaw, ranges.yaw);
  s.tx = rng.uniform(-ranges.translation, ranges.translation);
  s.ty = rng.uniform(-ranges.translation, ranges.translation);
  s.depth_ratio = rng.uniform(1.0 - ranges.depth, 1.0 + ranges.depth);
  s.scale = rng.uniform(1.0 - ranges.scale, 1.0 + ranges.scale);
  return s;
}

scene::FrameState apply_eot(const scene::FrameState& frame, const EotSample& s) {
  if (!(s.depth_ratio > 0.0) || !(s.scale > 0.0))
    throw InvalidInput("eot ratios must be positive");
  scene::FrameState out = frame;
  out.target.yaw = scene::wrap_angle(frame.target.yaw + s.yaw_jitter);
  out.target.x += s.tx;
  out.target.y += s.ty;
  out.target.x = frame.ego.x + s.depth_ratio * (out.target.x - frame.ego.x);
  out.target.y = frame.ego.y + s.depth_ratio * (out.target.y - frame.ego.y);
  return out;
}

scene::VehicleSpec apply_eot(const scene::VehicleSpec& spec, const EotSample& s) {
  return scene::scaled(spec, s.scale);
}

}  // namespace viewdrift::surrogate
