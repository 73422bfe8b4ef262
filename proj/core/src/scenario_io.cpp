#include "viewdrift/scene/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "viewdrift/kv.hpp"

namespace viewdrift::scene {

std::string to_scn(const ScenarioSequence& seq) {
  kv::Doc doc;
  doc.add("scn", "1");
  doc.add("id", seq.id.empty() ? std::string("unnamed") : seq.id);
  doc.add("category", seq.category.empty() ? std::string("NONE") : seq.category);
  doc.add("maneuver", maneuver_name(seq.maneuver));
  doc.add("vehicle", {seq.target_spec.type, kv::fmt(seq.target_spec.length),
                      kv::fmt(seq.target_spec.width), kv::fmt(seq.target_spec.height)});
  doc.add("camera", {kv::fmt(seq.camera.focal), kv::fmt(seq.camera.cx), kv::fmt(seq.camera.cy),
                     std::to_string(seq.camera.width), std::to_string(seq.camera.height),
                     kv::fmt(seq.camera.mount.x), kv::fmt(seq.camera.mount.y),
                     kv::fmt(seq.camera.mount.yaw), kv::fmt(seq.camera.mount_height)});
  doc.add_num("dt", seq.dt);
  doc.add("frames", std::to_string(seq.frames.size()));
  for (const FrameState& f : seq.frames) {
    doc.add_nums("frame", {f.t, f.ego.x, f.ego.y, f.ego.yaw, f.ego_speed, f.target.x, f.target.y,
                           f.target.yaw, f.target_speed, f.illumination});
  }
  return doc.serialize();
}

ScenarioSequence from_scn(std::istream& in) {
  const kv::Doc doc = kv::parse(in);
  if (!doc.has("scn") || doc.str("scn") != "1") throw InvalidInput("scn: bad or missing version");

  ScenarioSequence seq;
  seq.id = doc.str("id");
  seq.category = doc.str("category");
  seq.maneuver = maneuver_from(doc.str("maneuver"));

  const auto& veh = doc.require("vehicle");
  if (veh.size() != 4) throw InvalidInput("scn: vehicle wants type l w h");
  seq.target_spec = {veh[0], kv::parse_double(veh[1]), kv::parse_double(veh[2]),
                     kv::parse_double(veh[3])};

  const auto& cam = doc.require("camera");
  if (cam.size() != 9) throw InvalidInput("scn: camera wants 9 values");
  seq.camera.focal = kv::parse_double(cam[0]);
  seq.camera.cx = kv::parse_double(cam[1]);
  seq.camera.cy = kv::parse_double(cam[2]);
  seq.camera.width = static_cast<int>(kv::parse_double(cam[3]));
  seq.camera.height = static_cast<int>(kv::parse_double(cam[4]));
  seq.camera.mount.x = kv::parse_double(cam[5]);
  seq.camera.mount.y = kv::parse_double(cam[6]);
  seq.camera.mount.yaw = kv::parse_double(cam[7]);
  seq.camera.mount_height = kv::parse_double(cam[8]);

  seq.dt = doc.num("dt");
  const std::size_t n = static_cast<std::size_t>(doc.num("frames"));
  for (const auto* toks : doc.all("frame")) {
    if (toks->size() != 10) throw InvalidInput("scn: frame wants 10 values");
    FrameState f;
    f.t = kv::parse_double((*toks)[0]);
    f.ego.x = kv::parse_double((*toks)[1]);
    f.ego.y = kv::parse_double((*toks)[2]);
    f.ego.yaw = kv::parse_double((*toks)[3]);
    f.ego_speed = kv::parse_double((*toks)[4]);
    f.target.x = kv::parse_double((*toks)[5]);
    f.target.y = kv::parse_double((*toks)[6]);
    f.target.yaw = kv::parse_double((*toks)[7]);
    f.target_speed = kv::parse_double((*toks)[8]);
    f.illumination = kv::parse_double((*toks)[9]);
    seq.frames.push_back(f);
  }
  if (seq.frames.size() != n) throw InvalidInput("scn: frame count mismatch");
  validate(seq);
  return seq;
}

void write_scn(const std::string& path, const ScenarioSequence& seq) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << to_scn(seq);
}

ScenarioSequence read_scn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return from_scn(in);
}

}  // namespace viewdrift::scene
