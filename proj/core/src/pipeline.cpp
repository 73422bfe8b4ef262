#include "viewdrift/downstream/pipeline.hpp"

#include <cmath>

namespace viewdrift::downstream {

PipelineConfig pipeline_a() {
  PipelineConfig cfg;
  cfg.name = "A";
  cfg.planner.safety_margin = 1.0;
  cfg.planner.horizon = 3.0;
  return cfg;
}

PipelineConfig pipeline_b() {
  PipelineConfig cfg;
  cfg.name = "B";
  cfg.planner.safety_margin = 0.8;
  cfg.planner.horizon = 2.5;
  return cfg;
}

double planning_error(const Plan& clean, const Plan& attacked, double w_mtd) {
  if (w_mtd < 0.0) throw InvalidInput("w_mtd must be >= 0");
  const double decel_gain = attacked.max_decel - clean.max_decel;
  const double clearance_loss =
      std::max(0.0, clean.min_target_distance - attacked.min_target_distance);
  return decel_gain + w_mtd * clearance_loss;
}

Trajectory fake_prediction(const std::vector<scene::DetectionBox>& clean_dets,
                           const std::array<double, 2>& u, double s, double t_now,
                           double horizon, double dt, const TrackerParams& p) {
  if (clean_dets.empty()) throw InvalidInput("empty detection sequence");
  const double norm = std::hypot(u[0], u[1]);
  if (std::abs(norm - 1.0) > 1e-6) throw InvalidInput("u must be a unit vector");
  if (s < 0.0) throw InvalidInput("step size must be >= 0");

  std::vector<scene::DetectionBox> shifted = clean_dets;
  for (std::size_t k = 0; k < shifted.size(); ++k) {
    const double mag = s * static_cast<double>(k + 1);
    shifted[k].box.x += mag * u[0];
    shifted[k].box.y += mag * u[1];
  }
  const TrackState st = track_sequence(shifted, p);
  return predict_trajectory(st, t_now, horizon, dt);
}

}  // namespace viewdrift::downstream
