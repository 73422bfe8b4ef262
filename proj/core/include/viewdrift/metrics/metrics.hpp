#pragma once
#include <vector>

#include "viewdrift/attack/losses.hpp"
#include "viewdrift/downstream/planner.hpp"

namespace viewdrift::metrics {

// Per-frame center displacements along the drift direction, meters.
using FrameDisplacements = std::vector<double>;

struct MetricReport {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;  // m
  double pdr = 0.0;                     // percent of strictly increasing runs
  double ape = 0.0;                     // m, prediction deviation
  double mtd = 0.0;                     // m, prediction-to-path clearance
  double mbd = 0.0;                     // m/s^2, braking demand
  double asr = 0.0;                     // percent of runs braking at >= 3 m/s^2
  double cv = 0.0;                      // stability of the displacement
  double bfs = 1.0;                     // box fidelity, (0, 1]
};

// True when every step grows: d1 < d2 < ... < dK.
bool progressive(const FrameDisplacements& d);

// Percent of samples with strictly increasing displacements.
double pdr(const std::vector<FrameDisplacements>& samples);

// Mean Euclidean deviation over aligned waypoints; the trajectories must
// share length, start time and spacing.
double ape(const downstream::Trajectory& clean, const downstream::Trajectory& attacked);

// Minimum distance from the predicted waypoints to the ego path, densified
// at 0.1 m.
double mtd(const downstream::Trajectory& attacked_prediction,
           const downstream::Trajectory& ego_path);

// Peak deceleration demanded by a plan.
double mbd(const downstream::Plan& plan);

// Percent of runs whose braking demand reaches the threshold.
double asr(const std::vector<double>& mbds, double threshold = 3.0);

// Population standard deviation over mean; zero mean is undefined.
double cv(const std::vector<double>& values);

// exp(-fidelity distance): 1 iff confidence, dims and yaw all match.
double bfs(const scene::DetectionBox& clean, const scene::DetectionBox& attacked);

// Three-frame average displacement.
double mean_displacement(const FrameDisplacements& d);

}  // namespace viewdrift::metrics
