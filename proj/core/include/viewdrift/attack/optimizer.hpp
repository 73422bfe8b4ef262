#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "viewdrift/attack/evaluator.hpp"

namespace viewdrift::attack {

// One training unit: an attack window, the kinematic goal pinned to it, and
// the texture-to-body mapping for its vehicle spec. All atlases in a batch
// must share the texture dimensions.
struct TrainScenario {
  scene::ScenarioSequence window;
  AttackTarget target;
  surrogate::FaceAtlas atlas;
};

struct OptimizerParams {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int steps = 500;
  int eot_samples = 1;  // stochastic pose/appearance draws per scenario per step
  bool use_eot = true;
  surrogate::EotRanges ranges;
  std::uint64_t seed = 7;  // EoT stream; draws depend on (seed, step, scenario)
  int trace_every = 25;    // subsampling; first and last step always traced
};

struct TracePoint {
  int step = 0;
  double total = 0.0;
  double move = 0.0;
  double prog = 0.0;
  double fid = 0.0;
  double tv = 0.0;
  double nps = 0.0;
};

// Adam state over the texture. The texture itself is always kept projected
// (clamped to [0,1] and float32-snapped); the moments stay full doubles.
struct OptimizerState {
  surrogate::Texture texture;
  std::vector<double> m, v;
  std::int64_t step = 0;

  static OptimizerState init(int h, int w);
};

// The unwrapped vehicle appearance: uniform black, which pools to an all-zero
// feature vector, so the benign pass reproduces the ground-truth boxes exactly.
surrogate::Texture base_texture(int h, int w);

// One Adam step against the mean scene loss over scenarios x EoT draws plus
// the texture regularizers; returns the pre-update loss breakdown. The clean
// reference pass uses base_tex under the same draw.
TracePoint optimize_step(OptimizerState& st, const surrogate::Texture& base_tex,
                         const std::vector<TrainScenario>& scenarios,
                         const surrogate::SurrogateDetector& det, const EvalParams& eval,
                         const LossWeights& weights, const Palette& palette,
                         const OptimizerParams& op);

struct OptimizeResult {
  surrogate::Texture texture;
  std::vector<TracePoint> trace;
  TracePoint last;
};

OptimizeResult optimize(const std::vector<TrainScenario>& scenarios,
                        const surrogate::SurrogateDetector& det, const EvalParams& eval,
                        const LossWeights& weights, const Palette& palette,
                        const OptimizerParams& op);

// Binary state image (magic VDOPTST1): resuming from disk reproduces the
// run bit for bit.
void write_state(const std::string& path, const OptimizerState& st);
OptimizerState read_state(const std::string& path);

}  // namespace viewdrift::attack
