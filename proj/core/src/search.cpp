#include "viewdrift/attack/target.hpp"

#include <cmath>

#include "viewdrift/scene/geometry.hpp"

namespace viewdrift::attack {

std::vector<std::array<double, 2>> direction_grid(int n) {
  if (n < 1) throw InvalidInput("direction grid needs at least one entry");
  std::vector<std::array<double, 2>> dirs;
  dirs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    dirs.push_back({std::cos(a), std::sin(a)});
  }
  return dirs;
}

std::vector<double> step_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5}; }

double displacement(const std::array<double, 2>& clean_center,
                    const std::array<double, 2>& attacked_center,
                    const std::array<double, 2>& u) {
  const double norm = std::hypot(u[0], u[1]);
  if (std::abs(norm - 1.0) > 1e-6) throw InvalidInput("u must be a unit vector");
  return (attacked_center[0] - clean_center[0]) * u[0] +
         (attacked_center[1] - clean_center[1]) * u[1];
}

AttackTarget search_target(const scene::ScenarioSequence& seq,
                           const downstream::Trajectory& ego_path,
                           const downstream::PipelineConfig& pipeline,
                           const std::vector<std::array<double, 2>>& dirs,
                           const std::vector<double>& steps) {
  scene::validate(seq);
  if (dirs.empty() || steps.empty()) throw InvalidInput("empty search grid");

  std::vector<scene::DetectionBox> clean;
  clean.reserve(seq.frames.size());
  for (const scene::FrameState& f : seq.frames)
    clean.push_back(scene::clean_detection(f, seq.target_spec));

  const double t_now = seq.frames.back().t;
  const scene::FrameState& last = seq.frames.back();
  const downstream::TrackState clean_track = downstream::track_sequence(clean, pipeline.tracker);
  const downstream::Trajectory clean_pred = downstream::predict_trajectory(
      clean_track, t_now, pipeline.planner.horizon, pipeline.planner.dt);
  const downstream::Plan clean_plan =
      downstream::plan(last, ego_path, clean_pred, pipeline.planner);

  AttackTarget best;
  bool found = false;
  for (double s : steps) {
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      const downstream::Trajectory pred = downstream::fake_prediction(
          clean, dirs[d], s, t_now, pipeline.planner.horizon, pipeline.planner.dt,
          pipeline.tracker);
      const downstream::Plan attacked = downstream::plan(last, ego_path, pred, pipeline.planner);
      const double e = downstream::planning_error(clean_plan, attacked, pipeline.w_mtd);
      // Iteration order (s ascending, then direction order) realizes the tie
      // break: keep the incumbent unless strictly better.
      if (!found || e > best.e_plan) {
        best.u = dirs[d];
        best.s = s;
        best.e_plan = e;
        found = true;
      }
    }
  }
  return best;
}

AttackTarget group_target(const std::vector<AttackTarget>& targets) {
  if (targets.empty()) throw InvalidInput("empty target group");
  double ux = 0.0, uy = 0.0, s = 0.0, e = 0.0;
  for (const AttackTarget& t : targets) {
    ux += t.u[0];
    uy += t.u[1];
    s += t.s;
    e += t.e_plan;
  }
  const double n = static_cast<double>(targets.size());
  ux /= n;
  uy /= n;
  const double norm = std::hypot(ux, uy);
  if (norm < 1e-6) throw DegenerateGroup("mean attack direction nearly cancels");
  AttackTarget out;
  out.u = {ux / norm, uy / norm};
  out.s = s / n;
  out.e_plan = e / n;
  return out;
}

}  // namespace viewdrift::attack
