#pragma once
#include <array>
#include <optional>

#include "viewdrift/scene/types.hpp"

namespace viewdrift::scene {

// Aspect angle: signed angle from the ego->target ray to the target heading,
// wrapped to (-pi, pi]. 0 means the ego looks at the tail, pi at the nose.
double viewing_angle(const Pose2& ego, const Pose2& target);

// Azimuth of the camera as seen from the target body frame; the companion
// quantity face_visibility and the pooling tilt are driven by. Equals
// wrap(pi - viewing_angle).
double camera_azimuth(const Pose2& ego, const Pose2& target);

// |aspect(last) - aspect(first)|, wrapped into [0, pi].
double viewing_angle_variation(const ScenarioSequence& seq);
double viewing_angle_variation(const ScenarioSequence& seq, std::size_t first, std::size_t last);

enum Face { kFaceFront = 0, kFaceRear = 1, kFaceLeft = 2, kFaceRight = 3 };
inline constexpr std::array<const char*, 4> kFaceNames{"front", "rear", "left", "right"};

using FaceWeights = std::array<double, 4>;

// Cosine-weighted visibility of the four body sides from the ego position.
// Far-field model: the ray is evaluated at the body center, so the spec dims
// drop out of the weights; self-occlusion keeps at most two faces nonzero.
FaceWeights face_visibility(const Pose2& ego, const Pose2& target, const VehicleSpec& spec);

struct Pixel {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;  // camera-frame forward distance, m
};

// Projects a world point through the ego-mounted camera. nullopt when the
// point is at or behind the image plane.
std::optional<Pixel> try_project(const CameraModel& cam, const Pose2& ego,
                                 double wx, double wy, double wz);

// True when the point projects in front of the camera and inside the image.
bool in_frustum(const CameraModel& cam, const Pose2& ego, double wx, double wy, double wz);

// Convex-hull area, in px^2, of the eight projected box corners.
// Throws NotVisible if any corner is at or behind the camera plane.
double projected_area(const CameraModel& cam, const Pose2& ego, const Box3& box);

// Ground-truth box for the target: grounded at z = h/2, confidence 1.
DetectionBox clean_detection(const FrameState& frame, const VehicleSpec& spec);

// Exposure smear: fast-closing targets blur the wrap and damp its features.
// Returns 1/(1 + smear_coeff * |relative velocity|), in (0, 1].
double motion_sharpness(const FrameState& frame, double smear_coeff);

}  // namespace viewdrift::scene
