#pragma once
#include <iosfwd>
#include <string>

#include "viewdrift/scene/types.hpp"

namespace viewdrift::scene {

// Plain-text .scn format, one key per line. All doubles are written with 17
// significant digits, so write -> read -> write is byte-identical.
std::string to_scn(const ScenarioSequence& seq);
ScenarioSequence from_scn(std::istream& in);

void write_scn(const std::string& path, const ScenarioSequence& seq);
ScenarioSequence read_scn(const std::string& path);

}  // namespace viewdrift::scene
