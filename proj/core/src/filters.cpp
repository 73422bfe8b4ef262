#include "viewdrift/attack/filters.hpp"

#include <cmath>

namespace viewdrift::attack {

bool aff_filter(const scene::ScenarioSequence& seq, const downstream::Trajectory& ego_path,
                const downstream::PipelineConfig& pipeline, const AffParams& params) {
  scene::validate(seq);
  if (ego_path.pts.empty()) throw InvalidInput("empty ego path");

  std::vector<scene::DetectionBox> clean;
  clean.reserve(seq.frames.size());
  for (const scene::FrameState& f : seq.frames) {
    // (a) visible in the camera.
    const double cz = 0.5 * seq.target_spec.height;
    if (!scene::in_frustum(seq.camera, f.ego, f.target.x, f.target.y, cz)) return false;
    // (b) ahead of the ego.
    const double ahead = (f.target.x - f.ego.x) * std::cos(f.ego.yaw) +
                         (f.target.y - f.ego.y) * std::sin(f.ego.yaw);
    if (ahead <= 0.0) return false;
    clean.push_back(scene::clean_detection(f, seq.target_spec));
  }

  // (c) within the lateral relevance band of the path.
  for (const scene::FrameState& f : seq.frames) {
    downstream::Trajectory point;
    point.dt = seq.dt;
    point.pts.push_back({f.target.x, f.target.y});
    if (downstream::min_trajectory_distance(point, ego_path) > params.lateral_band) return false;
  }

  // (d) the clean scene must not already conflict with the plan.
  const downstream::TrackState st = downstream::track_sequence(clean, pipeline.tracker);
  const downstream::Trajectory pred = downstream::predict_trajectory(
      st, seq.frames.back().t, pipeline.planner.horizon, pipeline.planner.dt);
  if (downstream::min_trajectory_distance(pred, ego_path) < params.min_clean_mtd) return false;

  return true;
}

std::optional<VafWindow> vaf_filter(const scene::ScenarioSequence& seq, std::size_t k,
                                    double theta_min) {
  if (k < 2) throw InvalidInput("window needs at least two frames");
  if (!(theta_min > 0.0)) throw InvalidInput("theta_min must be positive");
  if (seq.frames.size() < k) throw InvalidInput("sequence shorter than the window");

  VafWindow best;
  bool found = false;
  for (std::size_t first = 0; first + k <= seq.frames.size(); ++first) {
    const double var = scene::viewing_angle_variation(seq, first, first + k - 1);
    if (!found || var > best.variation) {
      best.first = first;
      best.variation = var;
      found = true;
    }
  }
  if (!found || best.variation < theta_min) return std::nullopt;
  return best;
}

scene::ScenarioSequence slice(const scene::ScenarioSequence& seq, std::size_t first,
                              std::size_t count) {
  if (first + count > seq.frames.size()) throw InvalidInput("slice out of range");
  scene::ScenarioSequence out = seq;
  out.frames.assign(seq.frames.begin() + static_cast<std::ptrdiff_t>(first),
                    seq.frames.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

}  // namespace viewdrift::attack
