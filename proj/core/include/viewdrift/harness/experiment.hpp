#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "viewdrift/attack/filters.hpp"
#include "viewdrift/attack/optimizer.hpp"
#include "viewdrift/harness/templates.hpp"
#include "viewdrift/metrics/metrics.hpp"

namespace viewdrift::harness {

struct ExperimentConfig {
  std::string setting = "specific";  // specific | cv
  int folds = 5;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::uint64_t> detector_seeds{42};
  std::vector<std::string> pipelines{"A"};
  int tex_h = 64;
  int tex_w = 64;
  int window = 3;          // attack frames K
  double theta_min = 0.15; // rad, minimum viewing-angle variation
  attack::EvalParams eval;
  attack::LossWeights weights;
  attack::OptimizerParams opt;
  surrogate::DetectorParams detector;  // seed replaced per run
  int eval_eot_draws = 12;             // stability draws at evaluation time
  std::uint64_t bank_seed = 99;
  int bank_count = 220;  // truncate for smoke runs
  std::string out_dir;   // empty: keep everything in memory
  int jobs = 1;
};

ExperimentConfig default_config();
void validate_config(const ExperimentConfig& cfg);

// Flat key-per-line config file; unknown keys rejected, missing keys keep
// their defaults.
ExperimentConfig read_config(const std::string& path);
void write_config(const std::string& path, const ExperimentConfig& cfg);

struct ExperimentRecord {
  std::string scenario_id;
  std::string category;
  std::string group;  // sweep level, ablation row or transfer leg
  int fold = -1;
  std::uint64_t seed = 0;
  std::uint64_t detector_seed = 42;
  std::string pipeline = "A";
  std::string status = "ok";  // ok | rejected:* | skipped:* | error:*
  std::size_t window_first = 0;
  double variation = 0.0;
  attack::AttackTarget target;  // goal the texture was trained against
  metrics::MetricReport report;
  double e_plan = 0.0;  // realized planning error
  bool hard_brake = false;
  bool overtake_abandoned = false;
  std::string loss_trace;  // artifact paths relative to the output dir
  std::string texture_ppm;
  std::string texture_sidecar;
  std::string scenario_file;

  bool ok() const { return status == "ok"; }
};

// Filter -> window -> goal bundle for one scenario; `reject` is empty when
// the scenario is attackable.
struct Prepared {
  scene::ScenarioSequence window;
  downstream::Trajectory path;  // intended ego path from the decision frame
  std::size_t first = 0;
  double variation = 0.0;
  attack::AttackTarget target;
  std::string reject;
};

downstream::PipelineConfig pipeline_by_name(const std::string& name, scene::Maneuver maneuver,
                                            double dt);
Prepared prepare(const scene::ScenarioSequence& seq, const ExperimentConfig& cfg,
                 const downstream::PipelineConfig& pipeline, bool skip_vaf = false);

// Window evaluation of a finished texture: per-frame displacement averaged
// over the pose/appearance draws, the tracker->predictor->planner cascade at
// the nominal pose, and the displacement stability across draws.
struct WindowOutcome {
  std::vector<double> displacements;  // draw-averaged d_k
  double mean_d = 0.0;
  bool progressive = false;
  double ape = 0.0, mtd = 0.0, mbd = 0.0, bfs = 1.0;
  double e_plan = 0.0;
  bool hard_brake = false;
  bool overtake_abandoned = false;
  double cv = 0.0;  // spread of the final displacement across draws
};

WindowOutcome evaluate_window(const surrogate::Texture& tex, const surrogate::FaceAtlas& atlas,
                              const scene::ScenarioSequence& window,
                              const downstream::Trajectory& path,
                              const attack::AttackTarget& target,
                              const surrogate::SurrogateDetector& det,
                              const ExperimentConfig& cfg,
                              const downstream::PipelineConfig& pipeline);

// One scenario end to end: filters, goal search, optimization, evaluation,
// artifacts. Failures land in the record's status, never throw.
ExperimentRecord run_specific(const scene::ScenarioSequence& seq, const ExperimentConfig& cfg,
                              std::uint64_t seed, std::uint64_t detector_seed,
                              const std::string& pipeline_name);

// Cartesian product of scenarios x seeds x detector seeds x pipelines.
std::vector<ExperimentRecord> run_specific_suite(const std::vector<scene::ScenarioSequence>& seqs,
                                                 const ExperimentConfig& cfg);

struct FoldSummary {
  int fold = 0;
  attack::AttackTarget group;
  int train_size = 0;
  int test_size = 0;
  bool skipped = false;
};

struct CrossValidationResult {
  std::vector<ExperimentRecord> records;
  std::vector<FoldSummary> folds;
};

// Deterministic fold partition of the attackable scenarios; per fold, a
// shared texture is trained against the training split's group goal and the
// held-out scenarios are measured along that goal's fixed direction.
CrossValidationResult run_cross_validation(const std::vector<scene::ScenarioSequence>& bank,
                                           const ExperimentConfig& cfg);

// Two-level controlled comparison; records carry group "<factor>=low|high".
std::vector<ExperimentRecord> run_factor_sweep(const std::string& factor, int per_level,
                                               const ExperimentConfig& cfg);

struct AblationRow {
  std::string name;
  double d3 = 0.0;
  double cv = 0.0;
  double pdr = 0.0;
  double bfs = 0.0;
  double asr = 0.0;
};

struct AblationResult {
  std::vector<ExperimentRecord> records;
  std::vector<AblationRow> rows;  // "full" first, then one row per toggle
};

// Single-toggle-off comparison on a fixed suite. Toggles: vaf, eot, move,
// prog, fid, style.
AblationResult run_ablation(const std::vector<scene::ScenarioSequence>& suite,
                            const std::vector<std::string>& toggles, const ExperimentConfig& cfg);

struct TransferResult {
  ExperimentRecord source;
  ExperimentRecord target;
};

// Train under one response-head seed, measure under another.
TransferResult run_detector_transfer(const scene::ScenarioSequence& seq,
                                     const ExperimentConfig& cfg, std::uint64_t source_seed,
                                     std::uint64_t target_seed);

// Rewrap the optimized texture onto a different body and measure there.
TransferResult run_vehicle_transfer(const scene::ScenarioSequence& seq,
                                    const ExperimentConfig& cfg, const std::string& target_type);

struct SizePoint {
  int train_size = 0;
  double mean_d3 = 0.0;
  double pdr = 0.0;
};

struct SizeSweepResult {
  std::vector<ExperimentRecord> records;
  std::vector<SizePoint> points;
  std::vector<std::string> test_ids;  // fixed across all sizes
};

// Fixed held-out set, growing nested training subsets.
SizeSweepResult run_training_size_sweep(int test_size, const std::vector<int>& train_sizes,
                                        const ExperimentConfig& cfg);

}  // namespace viewdrift::harness
