#include "viewdrift/metrics/metrics.hpp"

#include <cmath>

namespace viewdrift::metrics {

bool progressive(const FrameDisplacements& d) {
  if (d.size() < 2) throw InvalidInput("need at least two displacements");
  for (std::size_t k = 0; k + 1 < d.size(); ++k)
    if (!(d[k + 1] > d[k])) return false;
  return true;
}

double pdr(const std::vector<FrameDisplacements>& samples) {
  if (samples.empty()) throw InvalidInput("no displacement samples");
  std::size_t hits = 0;
  for (const auto& d : samples)
    if (progressive(d)) ++hits;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(samples.size());
}

double ape(const downstream::Trajectory& clean, const downstream::Trajectory& attacked) {
  if (clean.pts.size() != attacked.pts.size() || clean.pts.empty())
    throw InvalidInput("trajectories must align waypoint for waypoint");
  if (std::abs(clean.t0 - attacked.t0) > 1e-9 || std::abs(clean.dt - attacked.dt) > 1e-9)
    throw InvalidInput("trajectory timestamps differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < clean.pts.size(); ++i)
    sum += std::hypot(attacked.pts[i][0] - clean.pts[i][0], attacked.pts[i][1] - clean.pts[i][1]);
  return sum / static_cast<double>(clean.pts.size());
}

double mtd(const downstream::Trajectory& attacked_prediction,
           const downstream::Trajectory& ego_path) {
  return downstream::min_trajectory_distance(attacked_prediction, ego_path, 0.1);
}

double mbd(const downstream::Plan& plan) {
  double peak = 0.0;
  for (double d : plan.decel) peak = std::max(peak, d);
  return peak;
}

double asr(const std::vector<double>& mbds, double threshold) {
  if (mbds.empty()) throw InvalidInput("no braking samples");
  std::size_t hits = 0;
  for (double m : mbds)
    if (m >= threshold) ++hits;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(mbds.size());
}

double cv(const std::vector<double>& values) {
  if (values.empty()) throw InvalidInput("no values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (mean == 0.0) throw UndefinedMetric("coefficient of variation of a zero-mean set");
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return std::sqrt(var) / mean;
}

double bfs(const scene::DetectionBox& clean, const scene::DetectionBox& attacked) {
  return std::exp(-attack::loss_fid(attack::fidelity(attacked), attack::fidelity(clean)));
}

double mean_displacement(const FrameDisplacements& d) {
  if (d.size() != 3) throw InvalidInput("expected exactly three displacements");
  return (d[0] + d[1] + d[2]) / 3.0;
}

}  // namespace viewdrift::metrics
