#include "viewdrift/scene/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace viewdrift::scene {

namespace {

constexpr double kEps = 1e-9;

struct P2 {
  double x, y;
};

// Andrew monotone chain; returns twice nothing special, plain hull area.
double hull_area(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end(), [](const P2& a, const P2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const P2& a, const P2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return 0.0;
  auto cross = [](const P2& o, const P2& a, const P2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<P2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 1 ? k - 1 : 0);
  double area2 = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const P2& a = hull[i];
    const P2& b = hull[(i + 1) % hull.size()];
    area2 += a.x * b.y - a.y * b.x;
  }
  return 0.5 * std::abs(area2);
}

}  // namespace

VehicleSpec catalogue(const std::string& type) {
  if (type == "SUV") return {"SUV", 4.6, 1.9, 1.8};
  if (type == "SEDAN") return {"SEDAN", 4.7, 1.8, 1.45};
  if (type == "VAN") return {"VAN", 5.0, 2.0, 2.2};
  throw InvalidInput("unknown vehicle type: " + type);
}

VehicleSpec scaled(const VehicleSpec& spec, double factor) {
  if (!(factor > 0.0)) throw InvalidInput("vehicle scale must be positive");
  return {spec.type, spec.length * factor, spec.width * factor, spec.height * factor};
}

std::string maneuver_name(Maneuver m) {
  switch (m) {
    case Maneuver::kPassBy: return "pass_by";
    case Maneuver::kOvertake: return "overtake";
    case Maneuver::kParkedTarget: return "parked";
  }
  throw InvalidInput("bad maneuver enum");
}

Maneuver maneuver_from(const std::string& name) {
  if (name == "pass_by") return Maneuver::kPassBy;
  if (name == "overtake") return Maneuver::kOvertake;
  if (name == "parked") return Maneuver::kParkedTarget;
  throw InvalidInput("unknown maneuver: " + name);
}

void validate(const ScenarioSequence& seq) {
  if (seq.frames.empty()) throw InvalidInput("scenario has no frames");
  if (!(seq.dt > 0.0)) throw InvalidInput("scenario dt must be positive");
  if (!(seq.target_spec.length > 0.0 && seq.target_spec.width > 0.0 && seq.target_spec.height > 0.0))
    throw InvalidInput("vehicle dims must be positive");
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const FrameState& f = seq.frames[i];
    if (f.illumination < 0.0 || f.illumination > 1.0)
      throw InvalidInput("illumination outside [0,1]");
    if (i > 0) {
      const double step = f.t - seq.frames[i - 1].t;
      if (std::abs(step - seq.dt) > 1e-9) throw InvalidInput("non-uniform frame dt");
    }
  }
}

double viewing_angle(const Pose2& ego, const Pose2& target) {
  const double dx = target.x - ego.x;
  const double dy = target.y - ego.y;
  if (dx * dx + dy * dy < kEps * kEps)
    throw DegenerateGeometry("ego and target coincide");
  return wrap_angle(target.yaw - std::atan2(dy, dx));
}

double camera_azimuth(const Pose2& ego, const Pose2& target) {
  const double dx = ego.x - target.x;
  const double dy = ego.y - target.y;
  if (dx * dx + dy * dy < kEps * kEps)
    throw DegenerateGeometry("ego and target coincide");
  return wrap_angle(std::atan2(dy, dx) - target.yaw);
}

double viewing_angle_variation(const ScenarioSequence& seq) {
  if (seq.frames.size() < 2) throw InvalidInput("need at least two frames");
  return viewing_angle_variation(seq, 0, seq.frames.size() - 1);
}

double viewing_angle_variation(const ScenarioSequence& seq, std::size_t first, std::size_t last) {
  if (first >= seq.frames.size() || last >= seq.frames.size() || first >= last)
    throw InvalidInput("bad frame window");
  const double a = viewing_angle(seq.frames[first].ego, seq.frames[first].target);
  const double b = viewing_angle(seq.frames[last].ego, seq.frames[last].target);
  return std::abs(wrap_angle(b - a));
}

FaceWeights face_visibility(const Pose2& ego, const Pose2& target, const VehicleSpec& spec) {
  if (!(spec.length > 0.0 && spec.width > 0.0 && spec.height > 0.0))
    throw InvalidInput("vehicle dims must be positive");
  const double az = camera_azimuth(ego, target);
  // Outward normals in the target body frame: front 0, rear pi, left +pi/2,
  // right -pi/2. Weight is the clamped cosine to the camera direction.
  FaceWeights w{};
  w[kFaceFront] = std::max(0.0, std::cos(az));
  w[kFaceRear] = std::max(0.0, -std::cos(az));
  w[kFaceLeft] = std::max(0.0, std::sin(az));
  w[kFaceRight] = std::max(0.0, -std::sin(az));
  return w;
}

std::optional<Pixel> try_project(const CameraModel& cam, const Pose2& ego,
                                 double wx, double wy, double wz) {
  const double cyaw = ego.yaw;
  const double cx = ego.x + std::cos(cyaw) * cam.mount.x - std::sin(cyaw) * cam.mount.y;
  const double cy = ego.y + std::sin(cyaw) * cam.mount.x + std::cos(cyaw) * cam.mount.y;
  const double cz = cam.mount_height;
  const double yaw = wrap_angle(cyaw + cam.mount.yaw);

  const double dx = wx - cx, dy = wy - cy, dz = wz - cz;
  // Camera frame: x right, y down, z forward (right-handed).
  const double zc = std::cos(yaw) * dx + std::sin(yaw) * dy;
  if (zc <= kEps) return std::nullopt;
  const double xc = std::sin(yaw) * dx - std::cos(yaw) * dy;
  const double yc = -dz;
  Pixel px;
  px.u = cam.focal * xc / zc + cam.cx;
  px.v = cam.focal * yc / zc + cam.cy;
  px.depth = zc;
  return px;
}

bool in_frustum(const CameraModel& cam, const Pose2& ego, double wx, double wy, double wz) {
  const auto px = try_project(cam, ego, wx, wy, wz);
  if (!px) return false;
  return px->u >= 0.0 && px->u < cam.width && px->v >= 0.0 && px->v < cam.height;
}

double projected_area(const CameraModel& cam, const Pose2& ego, const Box3& box) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  std::vector<P2> pts;
  pts.reserve(8);
  for (int i = 0; i < 8; ++i) {
    const double hl = (i & 1) ? 0.5 * box.l : -0.5 * box.l;
    const double hw = (i & 2) ? 0.5 * box.w : -0.5 * box.w;
    const double hh = (i & 4) ? 0.5 * box.h : -0.5 * box.h;
    const double wx = box.x + c * hl - s * hw;
    const double wy = box.y + s * hl + c * hw;
    const double wz = box.z + hh;
    const auto px = try_project(cam, ego, wx, wy, wz);
    if (!px) throw NotVisible("box corner behind camera");
    pts.push_back({px->u, px->v});
  }
  return hull_area(std::move(pts));
}

DetectionBox clean_detection(const FrameState& frame, const VehicleSpec& spec) {
  if (!(spec.length > 0.0 && spec.width > 0.0 && spec.height > 0.0))
    throw InvalidInput("vehicle dims must be positive");
  DetectionBox det;
  det.box.x = frame.target.x;
  det.box.y = frame.target.y;
  det.box.z = 0.5 * spec.height;
  det.box.l = spec.length;
  det.box.w = spec.width;
  det.box.h = spec.height;
  det.box.yaw = wrap_angle(frame.target.yaw);
  det.confidence = 1.0;
  return det;
}

double motion_sharpness(const FrameState& frame, double smear_coeff) {
  if (smear_coeff < 0.0) throw InvalidInput("smear coefficient must be >= 0");
  const double vex = frame.ego_speed * std::cos(frame.ego.yaw);
  const double vey = frame.ego_speed * std::sin(frame.ego.yaw);
  const double vtx = frame.target_speed * std::cos(frame.target.yaw);
  const double vty = frame.target_speed * std::sin(frame.target.yaw);
  const double rel = std::hypot(vtx - vex, vty - vey);
  return 1.0 / (1.0 + smear_coeff * rel);
}

}  // namespace viewdrift::scene
