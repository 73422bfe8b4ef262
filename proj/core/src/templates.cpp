#include "viewdrift/harness/templates.hpp"

#include <cmath>
#include <cstdio>

#include "viewdrift/rng.hpp"
#include "viewdrift/scene/geometry.hpp"

namespace viewdrift::harness {

namespace {

std::vector<std::string> split_tag(const std::string& category) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : category) {
    if (c == '-') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

ScenarioTemplate template_for(const std::string& category) {
  const auto parts = split_tag(category);
  if (parts.size() != 3) throw InvalidInput("category must look like TYPE-POS-DIR: " + category);
  ScenarioTemplate tpl;
  tpl.category = category;
  tpl.vehicle_type = parts[0];
  scene::catalogue(tpl.vehicle_type);  // validates the type
  if (parts[1] != "L" && parts[1] != "R") throw InvalidInput("position must be L or R");
  if (parts[2] != "S" && parts[2] != "O") throw InvalidInput("direction must be S or O");
  tpl.side = parts[1][0];
  tpl.direction = parts[2][0];
  if (tpl.direction == 'O') {
    // Oncoming traffic closes fast; start far out so the window of interest
    // (the final approach) still sits ahead of the ego.
    tpl.target_speed = {4.0, 8.0};
    tpl.lon_offset = {60.0, 92.0};
  }
  return tpl;
}

const std::vector<std::pair<std::string, int>>& bank_census() {
  static const std::vector<std::pair<std::string, int>> census = {
      {"SUV-R-S", 60}, {"SEDAN-R-S", 60}, {"SEDAN-L-O", 19}, {"SEDAN-R-O", 14},
      {"SEDAN-L-S", 13}, {"VAN-L-S", 13}, {"SUV-L-S", 9},    {"SUV-L-O", 8},
      {"VAN-R-S", 8},  {"SUV-R-O", 6},   {"VAN-R-O", 6},     {"VAN-L-O", 4},
  };
  return census;
}

namespace {

// Keep every frame comfortably inside the camera's 45 degree half-FOV and
// ahead of the ego, with room for the box extent.
bool frames_valid(const std::vector<scene::FrameState>& frames) {
  for (const auto& f : frames) {
    const double dx = f.target.x - f.ego.x;
    const double dy = f.target.y - f.ego.y;
    const double ahead = dx * std::cos(f.ego.yaw) + dy * std::sin(f.ego.yaw);
    if (ahead < 4.0) return false;
    const double bearing = std::abs(scene::wrap_angle(std::atan2(dy, dx) - f.ego.yaw));
    if (bearing > 0.6) return false;
  }
  return true;
}

}  // namespace

std::vector<scene::ScenarioSequence> generate_scenarios(const ScenarioTemplate& tpl, int count,
                                                        std::uint64_t seed) {
  if (count <= 0) throw InvalidInput("count must be positive");
  if (tpl.frames < 2) throw InvalidInput("template needs at least two frames");
  if (!(tpl.dt > 0.0)) throw InvalidInput("dt must be positive");
  std::vector<scene::ScenarioSequence> out;
  if (tpl.lon_offset[1] * tpl.geom_scale <= 0.0) return out;  // cannot start ahead

  const scene::VehicleSpec spec =
      scene::scaled(scene::catalogue(tpl.vehicle_type), tpl.body_scale);
  const double tyaw = tpl.direction == 'O' ? M_PI : 0.0;
  for (int i = 0; i < count; ++i) {
    Rng rng(split_seed(seed, 0x5C17, static_cast<std::uint64_t>(i)));
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double ego_v = rng.uniform(tpl.ego_speed[0], tpl.ego_speed[1]);
      double tgt_v = rng.uniform(tpl.target_speed[0], tpl.target_speed[1]);
      if (tpl.maneuver == scene::Maneuver::kParkedTarget) tgt_v = 0.0;
      const double lon = rng.uniform(tpl.lon_offset[0], tpl.lon_offset[1]) * tpl.geom_scale;
      const double lat = rng.uniform(tpl.lat_offset[0], tpl.lat_offset[1]) * tpl.geom_scale *
                         (tpl.side == 'L' ? 1.0 : -1.0);
      const double illum = rng.uniform(tpl.illumination[0], tpl.illumination[1]);

      scene::ScenarioSequence seq;
      char idbuf[16];
      std::snprintf(idbuf, sizeof(idbuf), "-%03d", i);
      seq.id = tpl.category + idbuf;
      seq.category = tpl.category;
      seq.maneuver = tpl.maneuver;
      seq.target_spec = spec;
      seq.dt = tpl.dt;
      seq.frames.reserve(static_cast<std::size_t>(tpl.frames));
      for (int k = 0; k < tpl.frames; ++k) {
        const double t = k * tpl.dt;
        scene::FrameState f;
        f.t = t;
        f.ego = {ego_v * t, 0.0, 0.0};
        f.ego_speed = ego_v;
        f.target = {lon + std::cos(tyaw) * tgt_v * t, lat + std::sin(tyaw) * tgt_v * t,
                    scene::wrap_angle(tyaw)};
        f.target_speed = tgt_v;
        f.illumination = illum;
        seq.frames.push_back(f);
      }
      if (!frames_valid(seq.frames)) continue;
      scene::validate(seq);
      out.push_back(std::move(seq));
      break;
    }
  }
  return out;
}

std::vector<scene::ScenarioSequence> standard_bank(std::uint64_t seed) {
  std::vector<scene::ScenarioSequence> bank;
  bank.reserve(220);
  const auto& census = bank_census();
  for (std::size_t c = 0; c < census.size(); ++c) {
    const auto batch =
        generate_scenarios(template_for(census[c].first), census[c].second,
                           split_seed(seed, 0x8A2E, static_cast<std::uint64_t>(c)));
    bank.insert(bank.end(), batch.begin(), batch.end());
  }
  return bank;
}

downstream::Trajectory planned_ego_path(const scene::ScenarioSequence& seq, std::size_t first,
                                        double horizon) {
  if (first >= seq.frames.size()) throw InvalidInput("path start out of range");
  if (horizon < 0.0) throw InvalidInput("horizon must be >= 0");
  downstream::Trajectory path;
  path.t0 = seq.frames[first].t;
  path.dt = seq.dt;
  for (std::size_t k = first; k < seq.frames.size(); ++k)
    path.pts.push_back({seq.frames[k].ego.x, seq.frames[k].ego.y});
  const scene::FrameState& last = seq.frames.back();
  const int steps = static_cast<int>(std::ceil(horizon / seq.dt - 1e-9));
  for (int k = 1; k <= steps; ++k) {
    const double d = last.ego_speed * seq.dt * k;
    path.pts.push_back(
        {last.ego.x + d * std::cos(last.ego.yaw), last.ego.y + d * std::sin(last.ego.yaw)});
  }
  return path;
}

scene::ScenarioSequence canned_hard_braking() {
  scene::ScenarioSequence seq;
  seq.id = "CANNED-BRAKE";
  seq.category = "SEDAN-R-S";
  seq.maneuver = scene::Maneuver::kPassBy;
  seq.target_spec = scene::catalogue("SEDAN");
  seq.dt = 0.5;
  for (int k = 0; k < 8; ++k) {
    const double t = k * 0.5;
    scene::FrameState f;
    f.t = t;
    f.ego = {12.5 * t, 0.0, 0.0};
    f.ego_speed = 12.5;
    f.target = {26.0 + 6.5 * t, -1.95, 0.0};
    f.target_speed = 6.5;
    f.illumination = 0.9;
    seq.frames.push_back(f);
  }
  return seq;
}

scene::ScenarioSequence canned_abandoned_overtaking() {
  // The ego swings into the passing lane while closing on a slow sedan; its
  // corridor settles 2.0 m from the target's lane, so a modest predicted
  // drift toward the corridor collapses the margin below the abandon band.
  scene::ScenarioSequence seq;
  seq.id = "CANNED-ABANDON";
  seq.category = "SEDAN-R-S";
  seq.maneuver = scene::Maneuver::kOvertake;
  seq.target_spec = scene::catalogue("SEDAN");
  seq.dt = 0.5;
  const double ego_v = 9.0, step = ego_v * 0.5;
  const double ys[8] = {0.0, 0.0, 0.25, 0.65, 1.2, 1.7, 2.0, 2.0};
  double xs[8] = {0.0};
  for (int k = 1; k < 8; ++k) {
    const double dy = ys[k] - ys[k - 1];
    xs[k] = xs[k - 1] + std::sqrt(step * step - dy * dy);
  }
  for (int k = 0; k < 8; ++k) {
    scene::FrameState f;
    f.t = k * 0.5;
    const int j = std::min(k + 1, 7);
    f.ego = {xs[k], ys[k], std::atan2(ys[j] - ys[j - 1], xs[j] - xs[j - 1])};
    f.ego_speed = ego_v;
    f.target = {16.0 + 6.0 * f.t, 0.0, 0.0};
    f.target_speed = 6.0;
    f.illumination = 0.95;
    seq.frames.push_back(f);
  }
  return seq;
}

ScenarioTemplate sweep_template(const std::string& factor, int level) {
  if (level != 0 && level != 1) throw InvalidInput("sweep level must be 0 or 1");
  const bool hi = level == 1;
  if (factor == "speed") {
    // Oncoming geometry with the endpoint pinned: both levels finish the
    // window around 8..15 m ahead, so only the closing rate (and the motion
    // smear that rides on it) separates them.
    ScenarioTemplate tpl = template_for("SEDAN-R-O");
    tpl.ego_speed = {10.2, 10.8};
    tpl.lat_offset = {2.6, 4.0};
    tpl.illumination = {0.7, 0.9};
    tpl.target_speed = hi ? std::array<double, 2>{10.4, 11.2} : std::array<double, 2>{0.8, 1.6};
    tpl.lon_offset = hi ? std::array<double, 2>{82.0, 90.0} : std::array<double, 2>{49.0, 56.0};
    return tpl;
  }
  if (factor == "area") {
    ScenarioTemplate tpl = template_for("SEDAN-R-S");
    tpl.body_scale = hi ? 1.3 : 0.75;
    return tpl;
  }
  if (factor == "distance") {
    ScenarioTemplate tpl = template_for("SEDAN-R-S");
    tpl.geom_scale = hi ? 2.0 : 1.0;
    return tpl;
  }
  if (factor == "illumination") {
    ScenarioTemplate tpl = template_for("SEDAN-R-S");
    tpl.illumination = hi ? std::array<double, 2>{0.88, 0.92} : std::array<double, 2>{0.38, 0.42};
    return tpl;
  }
  if (factor == "variation") {
    // Oncoming approach whose closest pass sets the swept angle: skimming
    // close (high) versus standing off (low), at matched closing speed.
    ScenarioTemplate tpl = template_for("SEDAN-R-O");
    tpl.ego_speed = {10.2, 10.8};
    tpl.target_speed = {3.9, 4.5};
    tpl.illumination = {0.7, 0.9};
    tpl.lat_offset = hi ? std::array<double, 2>{2.3, 2.7} : std::array<double, 2>{5.2, 5.8};
    tpl.lon_offset = hi ? std::array<double, 2>{56.0, 58.0} : std::array<double, 2>{64.5, 67.5};
    return tpl;
  }
  throw InvalidInput("unknown sweep factor: " + factor);
}

}  // namespace viewdrift::harness
