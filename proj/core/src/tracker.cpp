#include "viewdrift/downstream/tracker.hpp"

#include <cmath>

namespace viewdrift::downstream {

namespace {

Eigen::Matrix<double, 6, 6> transition(double dt) {
  Eigen::Matrix<double, 6, 6> f = Eigen::Matrix<double, 6, 6>::Identity();
  f(0, 3) = dt;
  f(1, 4) = dt;
  f(2, 5) = dt;
  return f;
}

// White-acceleration process noise per (pos, rate) pair.
Eigen::Matrix<double, 6, 6> process_noise(const TrackerParams& p) {
  const double dt = p.dt;
  const double q11 = dt * dt * dt * dt / 4.0;
  const double q12 = dt * dt * dt / 2.0;
  const double q22 = dt * dt;
  Eigen::Matrix<double, 6, 6> q = Eigen::Matrix<double, 6, 6>::Zero();
  const double sa2 = p.sigma_accel * p.sigma_accel;
  const double sy2 = p.sigma_yaw_accel * p.sigma_yaw_accel;
  q(0, 0) = q11 * sa2; q(0, 3) = q12 * sa2; q(3, 0) = q12 * sa2; q(3, 3) = q22 * sa2;
  q(1, 1) = q11 * sa2; q(1, 4) = q12 * sa2; q(4, 1) = q12 * sa2; q(4, 4) = q22 * sa2;
  q(2, 2) = q11 * sy2; q(2, 5) = q12 * sy2; q(5, 2) = q12 * sy2; q(5, 5) = q22 * sy2;
  return q;
}

}  // namespace

TrackState track_init(const scene::DetectionBox& det, const TrackerParams& p) {
  if (!(det.box.l > 0.0 && det.box.w > 0.0 && det.box.h > 0.0))
    throw InvalidInput("detection dims must be positive");
  TrackState s;
  s.mean << det.box.x, det.box.y, scene::wrap_angle(det.box.yaw), 0.0, 0.0, 0.0;
  s.cov = Eigen::Matrix<double, 6, 6>::Zero();
  s.cov(0, 0) = s.cov(1, 1) = p.p0_pos * p.p0_pos;
  s.cov(2, 2) = p.p0_yaw * p.p0_yaw;
  s.cov(3, 3) = s.cov(4, 4) = p.p0_vel * p.p0_vel;
  s.cov(5, 5) = p.p0_yaw_rate * p.p0_yaw_rate;
  s.l = det.box.l;
  s.w = det.box.w;
  s.h = det.box.h;
  s.age = 1;
  s.hits = 1;
  s.initialized = true;
  return s;
}

TrackState track_update(const TrackState& state, const scene::DetectionBox& det,
                        const TrackerParams& p) {
  if (!state.initialized) return track_init(det, p);
  if (!(det.box.l > 0.0 && det.box.w > 0.0 && det.box.h > 0.0))
    throw InvalidInput("detection dims must be positive");

  TrackState s = state;
  const auto f = transition(p.dt);
  s.mean = f * s.mean;
  s.mean(2) = scene::wrap_angle(s.mean(2));
  s.cov = f * s.cov * f.transpose() + process_noise(p);
  s.age += 1;

  const double dx = det.box.x - s.mean(0);
  const double dy = det.box.y - s.mean(1);
  if (std::hypot(dx, dy) > p.gate) return s;  // coasted

  Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Zero();
  h(0, 0) = h(1, 1) = h(2, 2) = 1.0;
  Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
  r(0, 0) = r(1, 1) = p.r_pos * p.r_pos;
  r(2, 2) = p.r_yaw * p.r_yaw;

  Eigen::Vector3d innov(dx, dy, scene::wrap_angle(det.box.yaw - s.mean(2)));
  Eigen::Matrix3d sc = h * s.cov * h.transpose() + r;
  Eigen::LLT<Eigen::Matrix3d> llt(sc);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("innovation covariance not positive definite");
  Eigen::Matrix<double, 6, 3> k = s.cov * h.transpose() * llt.solve(Eigen::Matrix3d::Identity());

  s.mean += k * innov;
  s.mean(2) = scene::wrap_angle(s.mean(2));
  // Joseph form keeps the covariance symmetric positive.
  Eigen::Matrix<double, 6, 6> ikh = Eigen::Matrix<double, 6, 6>::Identity() - k * h;
  s.cov = ikh * s.cov * ikh.transpose() + k * r * k.transpose();

  s.l = det.box.l;
  s.w = det.box.w;
  s.h = det.box.h;
  s.hits += 1;
  return s;
}

TrackState track_sequence(const std::vector<scene::DetectionBox>& dets, const TrackerParams& p) {
  if (dets.empty()) throw InvalidInput("empty detection sequence");
  TrackState s = track_init(dets.front(), p);
  for (std::size_t i = 1; i < dets.size(); ++i) s = track_update(s, dets[i], p);
  return s;
}

}  // namespace viewdrift::downstream
