#include "viewdrift/downstream/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace viewdrift::downstream {

Trajectory predict_trajectory(const TrackState& state, double t_now, double horizon, double dt) {
  if (!state.initialized) throw InvalidInput("predict on uninitialized track");
  if (!(horizon > 0.0) || !(dt > 0.0)) throw InvalidInput("horizon and dt must be positive");
  Trajectory traj;
  traj.t0 = t_now;
  traj.dt = dt;
  const int n = static_cast<int>(std::lround(horizon / dt));
  if (n <= 0) throw InvalidInput("horizon shorter than dt");
  traj.pts.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    traj.pts.push_back({state.mean(0) + state.mean(3) * dt * k,
                        state.mean(1) + state.mean(4) * dt * k});
  }
  return traj;
}

double min_trajectory_distance(const Trajectory& traj, const Trajectory& path, double step) {
  if (traj.pts.empty() || path.pts.empty()) throw InvalidInput("empty trajectory");
  if (!(step > 0.0)) throw InvalidInput("densify step must be positive");

  // Densified copy of the path, endpoints included.
  std::vector<std::array<double, 2>> dense;
  dense.push_back(path.pts.front());
  for (std::size_t i = 0; i + 1 < path.pts.size(); ++i) {
    const auto& a = path.pts[i];
    const auto& b = path.pts[i + 1];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int s = 1; s <= steps; ++s) {
      const double f = static_cast<double>(s) / steps;
      dense.push_back({a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])});
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : traj.pts)
    for (const auto& q : dense)
      best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
  return best;
}

}  // namespace viewdrift::downstream
