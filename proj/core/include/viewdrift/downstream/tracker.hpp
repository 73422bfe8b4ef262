#pragma once
#include <Eigen/Dense>

#include "viewdrift/scene/types.hpp"

namespace viewdrift::downstream {

struct TrackerParams {
  double dt = 0.5;
  double sigma_accel = 2.5;     // process accel noise, m/s^2
  double sigma_yaw_accel = 0.8; // rad/s^2
  double r_pos = 0.08;          // measurement std, m
  double r_yaw = 0.05;          // rad
  double p0_pos = 1.0;
  double p0_vel = 4.0;
  double p0_yaw = 0.3;
  double p0_yaw_rate = 1.0;
  double gate = 5.0;            // Euclidean association gate, m
};

// Constant-velocity Kalman state: (x, y, yaw, vx, vy, yaw_rate).
struct TrackState {
  Eigen::Matrix<double, 6, 1> mean = Eigen::Matrix<double, 6, 1>::Zero();
  Eigen::Matrix<double, 6, 6> cov = Eigen::Matrix<double, 6, 6>::Identity();
  double l = 0.0, w = 0.0, h = 0.0;  // last associated box dims
  int age = 0;
  int hits = 0;
  bool initialized = false;
};

TrackState track_init(const scene::DetectionBox& det, const TrackerParams& p);

// Predict + gated update; a detection outside the gate only ages the track.
// Throws NumericalFailure if the innovation covariance loses definiteness.
TrackState track_update(const TrackState& state, const scene::DetectionBox& det,
                        const TrackerParams& p);

// Convenience: init on the first detection, update on the rest.
TrackState track_sequence(const std::vector<scene::DetectionBox>& dets, const TrackerParams& p);

}  // namespace viewdrift::downstream
