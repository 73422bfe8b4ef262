#pragma once
#include "viewdrift/downstream/predictor.hpp"
#include "viewdrift/scene/types.hpp"

namespace viewdrift::downstream {

struct PlannerParams {
  double safety_margin = 1.0;        // m
  double horizon = 3.0;              // s
  double dt = 0.5;
  double hard_brake_threshold = 3.0; // m/s^2
  double v_safe = 3.0;               // residual speed at the conflict, m/s
  double footprint_radius = 0.9;     // target footprint allowance, m
  double corridor_margin = 1.0;      // overtake corridor clearance, m
  double min_conflict_distance = 1.0;
  bool overtake_intent = false;
};

struct Plan {
  Trajectory ego_path;            // reference path the checks ran against
  std::vector<double> speed;      // planned speed per step
  std::vector<double> decel;      // required decel per step, >= 0
  double max_decel = 0.0;
  double min_clearance = 0.0;     // min over steps of (distance - footprint)
  double min_target_distance = 0.0;  // min raw distance prediction -> path
  bool hard_brake = false;
  bool overtake_abandoned = false;
};

// Per-step clearance check of the predicted target against the ego path.
// Conflict at step i (clearance below margin) demands
//   decel = max(0, (v^2 - v_safe^2) / (2 * d_conflict))
// where d_conflict is the arc distance to the conflict point.
Plan plan(const scene::FrameState& ego_frame, const Trajectory& ego_path,
          const Trajectory& prediction, const PlannerParams& p);

}  // namespace viewdrift::downstream
