#pragma once
#include <array>
#include <vector>

#include "viewdrift/downstream/pipeline.hpp"
#include "viewdrift/scene/types.hpp"

namespace viewdrift::attack {

// Kinematic attack goal: drift direction u (unit, BEV) and per-frame step s.
struct AttackTarget {
  std::array<double, 2> u{1.0, 0.0};
  double s = 0.3;        // m per frame
  double e_plan = 0.0;   // planning error achieved by (u, s)
};

// 16 unit directions at 22.5 degree increments, starting at +x.
std::vector<std::array<double, 2>> direction_grid(int n = 16);

// Candidate per-frame steps, m.
std::vector<double> step_grid();

// Displacement of an attacked center along u.
double displacement(const std::array<double, 2>& clean_center,
                    const std::array<double, 2>& attacked_center,
                    const std::array<double, 2>& u);

// Exhaustive (u, s) search maximizing planning_error of the counterfactual
// prediction against the clean plan. Ties prefer smaller s, then the earlier
// direction in the grid.
AttackTarget search_target(const scene::ScenarioSequence& seq,
                           const downstream::Trajectory& ego_path,
                           const downstream::PipelineConfig& pipeline,
                           const std::vector<std::array<double, 2>>& dirs,
                           const std::vector<double>& steps);

// Group goal: normalized mean direction and mean step.
// Throws DegenerateGroup when the mean direction nearly cancels.
AttackTarget group_target(const std::vector<AttackTarget>& targets);

}  // namespace viewdrift::attack
