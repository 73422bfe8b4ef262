#pragma once
#include <cstddef>
#include <optional>

#include "viewdrift/downstream/pipeline.hpp"
#include "viewdrift/scene/geometry.hpp"

namespace viewdrift::attack {

struct AffParams {
  double lateral_band = 10.0;  // max offset from the ego path, m
  double min_clean_mtd = 1.0;  // the clean scene must not already intrude, m
};

// Attack-feasibility filter. True iff, over every frame: the target center
// projects inside the camera frustum, stays ahead of the ego, and stays
// within the lateral relevance band of the ego path; and the clean-pipeline
// prediction keeps at least min_clean_mtd distance from the path.
bool aff_filter(const scene::ScenarioSequence& seq, const downstream::Trajectory& ego_path,
                const downstream::PipelineConfig& pipeline, const AffParams& params);

struct VafWindow {
  std::size_t first = 0;   // index of the first frame of the window
  double variation = 0.0;  // viewing-angle variation over the window, rad
};

// Viewing-angle filter: the contiguous k-frame window with the largest
// viewing-angle variation, earliest on ties; nullopt when even the best
// window stays below theta_min.
std::optional<VafWindow> vaf_filter(const scene::ScenarioSequence& seq, std::size_t k,
                                    double theta_min);

// Copy of `count` frames starting at `first`.
scene::ScenarioSequence slice(const scene::ScenarioSequence& seq, std::size_t first,
                              std::size_t count);

}  // namespace viewdrift::attack
