#include "viewdrift/downstream/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace viewdrift::downstream {

namespace {

struct PathHit {
  double dist = std::numeric_limits<double>::infinity();
  double arc = 0.0;  // arc length from the path start to the nearest point
};

PathHit nearest_on_path(const std::vector<std::array<double, 2>>& path, double px, double py) {
  PathHit best;
  if (path.size() == 1) {
    best.dist = std::hypot(px - path[0][0], py - path[0][1]);
    best.arc = 0.0;
    return best;
  }
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double ax = path[i][0], ay = path[i][1];
    const double bx = path[i + 1][0], by = path[i + 1][1];
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((px - ax) * vx + (py - ay) * vy) / len2, 0.0, 1.0);
    const double qx = ax + t * vx, qy = ay + t * vy;
    const double d = std::hypot(px - qx, py - qy);
    if (d < best.dist) {
      best.dist = d;
      best.arc = cum + t * std::sqrt(len2);
    }
    cum += std::sqrt(len2);
  }
  return best;
}

}  // namespace

Plan plan(const scene::FrameState& ego_frame, const Trajectory& ego_path,
          const Trajectory& prediction, const PlannerParams& p) {
  if (ego_path.pts.empty()) throw InvalidInput("empty ego path");
  if (prediction.pts.empty()) throw InvalidInput("empty prediction");
  if (std::abs(prediction.dt - p.dt) > 1e-9)
    throw InvalidInput("prediction dt does not match planner dt");
  if (!(p.horizon > 0.0) || !(p.dt > 0.0)) throw InvalidInput("bad planner horizon/dt");

  const std::size_t horizon_steps = static_cast<std::size_t>(std::lround(p.horizon / p.dt));
  const std::size_t n = std::min(prediction.pts.size(), horizon_steps);
  if (n == 0) throw InvalidInput("planner horizon shorter than one step");

  Plan out;
  out.ego_path = ego_path;
  out.min_clearance = std::numeric_limits<double>::infinity();
  out.min_target_distance = std::numeric_limits<double>::infinity();
  out.decel.resize(n, 0.0);
  out.speed.resize(n, 0.0);

  const double v = ego_frame.ego_speed;
  for (std::size_t i = 0; i < n; ++i) {
    const auto hit = nearest_on_path(ego_path.pts, prediction.pts[i][0], prediction.pts[i][1]);
    const double clearance = hit.dist - p.footprint_radius;
    out.min_target_distance = std::min(out.min_target_distance, hit.dist);
    out.min_clearance = std::min(out.min_clearance, clearance);
    if (clearance < p.safety_margin) {
      const double d_conflict = std::max(hit.arc, p.min_conflict_distance);
      out.decel[i] = std::max(0.0, (v * v - p.v_safe * p.v_safe) / (2.0 * d_conflict));
    }
  }

  out.max_decel = *std::max_element(out.decel.begin(), out.decel.end());
  double vi = v;
  for (std::size_t i = 0; i < n; ++i) {
    vi = std::max(0.0, vi - out.decel[i] * p.dt);
    out.speed[i] = vi;
  }
  out.hard_brake = out.max_decel >= p.hard_brake_threshold;
  out.overtake_abandoned = p.overtake_intent && out.min_clearance < p.corridor_margin;
  return out;
}

}  // namespace viewdrift::downstream
