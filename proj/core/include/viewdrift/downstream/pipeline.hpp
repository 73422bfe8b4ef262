#pragma once
#include <string>

#include "viewdrift/downstream/planner.hpp"

namespace viewdrift::downstream {

// A tracker + planner parameterization; two stock victims are provided.
struct PipelineConfig {
  std::string name = "A";
  TrackerParams tracker;
  PlannerParams planner;
  double w_mtd = 0.5;  // planning-error weight per meter of clearance loss
};

PipelineConfig pipeline_a();  // margin 1.0 m, horizon 3.0 s
PipelineConfig pipeline_b();  // margin 0.8 m, horizon 2.5 s

// (attacked max decel - clean max decel) + w_mtd * max(0, clearance loss).
double planning_error(const Plan& clean, const Plan& attacked, double w_mtd = 0.5);

// Counterfactual prediction: shift the clean detection centers by k*s*u
// (k = 1..K), re-run the tracker over the shifted detections, extrapolate.
Trajectory fake_prediction(const std::vector<scene::DetectionBox>& clean_dets,
                           const std::array<double, 2>& u, double s, double t_now,
                           double horizon, double dt, const TrackerParams& p);

}  // namespace viewdrift::downstream
