#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "viewdrift/downstream/predictor.hpp"
#include "viewdrift/scene/types.hpp"

namespace viewdrift::harness {

// Sampling ranges for one TYPE-POS-DIR scenario family.
struct ScenarioTemplate {
  std::string category;      // e.g. "SUV-R-S"
  std::string vehicle_type;  // catalogue key
  char side = 'R';           // L: target left of the ego lane, R: right
  char direction = 'S';      // S: same direction, O: oncoming
  scene::Maneuver maneuver = scene::Maneuver::kPassBy;
  int frames = 8;
  double dt = 0.5;
  std::array<double, 2> ego_speed{10.0, 13.0};
  std::array<double, 2> target_speed{3.5, 5.5};
  std::array<double, 2> lon_offset{26.0, 38.0};  // initial distance ahead, m
  std::array<double, 2> lat_offset{1.92, 2.15};  // magnitude, sign from side
  std::array<double, 2> illumination{0.55, 1.0};
  double body_scale = 1.0;  // target body size factor (projection-area knob)
  double geom_scale = 1.0;  // uniform offset scaling (distance knob)
};

// Template for a TYPE-POS-DIR tag, e.g. "SEDAN-L-O".
ScenarioTemplate template_for(const std::string& category);

// Category census of the standard 220-sequence bank.
const std::vector<std::pair<std::string, int>>& bank_census();

// Deterministic draws; each sequence is a function of (template, seed, index)
// alone, so changing count never reshuffles earlier entries. Draws that start
// behind the ego, leave the camera frustum or overrun the target are
// resampled; a template that cannot start ahead gives an empty list.
std::vector<scene::ScenarioSequence> generate_scenarios(const ScenarioTemplate& tpl, int count,
                                                        std::uint64_t seed);

// The full bank in census order.
std::vector<scene::ScenarioSequence> standard_bank(std::uint64_t seed);

// Reference path the ego intends to drive: its recorded poses from frame
// `first` on, extended past the last frame at constant speed and heading for
// `horizon` seconds.
downstream::Trajectory planned_ego_path(const scene::ScenarioSequence& seq, std::size_t first,
                                        double horizon);

// Deterministic set pieces for the downstream checks: a tailgating pass-by
// that hard-brakes once the prediction is bent, and an overtake whose
// corridor collapses under the same bending.
scene::ScenarioSequence canned_hard_braking();
scene::ScenarioSequence canned_abandoned_overtaking();

// Two-level controlled templates; level 0 is low, 1 is high. Factors:
// speed, area, distance, illumination, variation.
ScenarioTemplate sweep_template(const std::string& factor, int level);

}  // namespace viewdrift::harness
