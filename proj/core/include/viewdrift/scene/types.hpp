#pragma once
#include <cmath>
#include <string>
#include <vector>

#include "viewdrift/errors.hpp"

namespace viewdrift::scene {

// Canonical angle range is (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;  // rad, world frame
};

struct VehicleSpec {
  std::string type;  // SUV / SEDAN / VAN or a derived label
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;  // m
};

// Fixed body catalogue; throws InvalidInput for unknown types.
VehicleSpec catalogue(const std::string& type);
VehicleSpec scaled(const VehicleSpec& spec, double factor);

struct Box3 {
  double x = 0.0, y = 0.0, z = 0.0;  // center, world frame
  double l = 0.0, w = 0.0, h = 0.0;  // dims, m
  double yaw = 0.0;
};

struct DetectionBox {
  Box3 box;
  double confidence = 1.0;
};

// Pinhole camera rigidly mounted on the ego body.
struct CameraModel {
  double focal = 800.0;  // px
  double cx = 800.0;
  double cy = 450.0;
  int width = 1600;
  int height = 900;
  Pose2 mount;                 // pose relative to the ego body frame
  double mount_height = 1.5;   // m above ground
};

struct FrameState {
  double t = 0.0;
  Pose2 ego;
  double ego_speed = 0.0;  // m/s along ego yaw
  Pose2 target;
  double target_speed = 0.0;  // m/s along target yaw
  double illumination = 1.0;  // [0, 1]
};

enum class Maneuver { kPassBy, kOvertake, kParkedTarget };

std::string maneuver_name(Maneuver m);
Maneuver maneuver_from(const std::string& name);

struct ScenarioSequence {
  std::string id;
  std::string category;  // TYPE-POS-DIR tag, e.g. SUV-R-S
  Maneuver maneuver = Maneuver::kPassBy;
  VehicleSpec target_spec;
  CameraModel camera;
  double dt = 0.5;
  std::vector<FrameState> frames;

  std::size_t length() const { return frames.size(); }
};

// Checks positive dims, illumination range, uniform dt and monotone time.
void validate(const ScenarioSequence& seq);

}  // namespace viewdrift::scene
