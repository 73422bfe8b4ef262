#pragma once
#include <array>
#include <vector>

#include "viewdrift/downstream/tracker.hpp"

namespace viewdrift::downstream {

// Uniformly spaced future positions, first point at t0 + dt.
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.5;
  std::vector<std::array<double, 2>> pts;

  std::size_t size() const { return pts.size(); }
};

// Constant-velocity extrapolation of the track mean over the horizon.
Trajectory predict_trajectory(const TrackState& state, double t_now, double horizon, double dt);

// Minimum distance between the waypoints of `traj` and `path` densified by
// linear interpolation at `step` meters.
double min_trajectory_distance(const Trajectory& traj, const Trajectory& path, double step = 0.1);

}  // namespace viewdrift::downstream
