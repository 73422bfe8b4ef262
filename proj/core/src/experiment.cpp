#include "viewdrift/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "viewdrift/harness/report.hpp"
#include "viewdrift/kv.hpp"
#include "viewdrift/rng.hpp"
#include "viewdrift/scene/geometry.hpp"
#include "viewdrift/scene/scenario_io.hpp"

namespace viewdrift::harness {
namespace {

namespace fs = std::filesystem;

// Sub-seed streams; distinct constants keep the draw families independent.
constexpr std::uint64_t kEvalStream = 0xE7A1;
constexpr std::uint64_t kSpecificStream = 0xA77ACC;
constexpr std::uint64_t kFoldShuffleStream = 0xF01D;
constexpr std::uint64_t kFoldOptStream = 0xCF01;
constexpr std::uint64_t kSweepStream = 0x5EED;
constexpr std::uint64_t kSizeShuffleStream = 0x517E;
constexpr std::uint64_t kSizeOptStream = 0x517E2;
constexpr std::uint64_t kWindowStream = 0x51DE;

std::uint64_t hash_id(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Status strings land in a comma-separated file.
std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::size_t nt = std::min(n, static_cast<std::size_t>(jobs));
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::uint64_t parse_u64(const std::string& tok) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput("config: not an unsigned integer: " + tok);
  }
}

int as_int(const kv::Doc& doc, const std::string& key, int fallback) {
  if (!doc.has(key)) return fallback;
  return static_cast<int>(std::llround(doc.num(key)));
}

struct RunTweaks {
  bool skip_vaf = false;
  std::string group;
};

void fill_record(ExperimentRecord& rec, const WindowOutcome& o, double brake_threshold) {
  const auto& d = o.displacements;
  rec.report.d1 = d.size() > 0 ? d[0] : 0.0;
  rec.report.d2 = d.size() > 1 ? d[1] : 0.0;
  rec.report.d3 = d.size() > 2 ? d[2] : 0.0;
  rec.report.pdr = o.progressive ? 100.0 : 0.0;
  rec.report.ape = o.ape;
  rec.report.mtd = o.mtd;
  rec.report.mbd = o.mbd;
  rec.report.asr = o.mbd >= brake_threshold ? 100.0 : 0.0;
  rec.report.cv = o.cv;
  rec.report.bfs = o.bfs;
  rec.e_plan = o.e_plan;
  rec.hard_brake = o.hard_brake;
  rec.overtake_abandoned = o.overtake_abandoned;
}

std::string run_key(const ExperimentRecord& rec) {
  std::string key = rec.scenario_id;
  if (!rec.group.empty()) key += "_" + rec.group;
  key += "_s" + std::to_string(rec.seed) + "_d" + std::to_string(rec.detector_seed) + "_" +
         rec.pipeline;
  return key;
}

void save_artifacts(ExperimentRecord& rec, const attack::OptimizeResult& result,
                    const std::string& out_dir) {
  if (out_dir.empty()) return;
  const std::string key = run_key(rec);
  rec.texture_ppm = "texture_" + key + ".ppm";
  rec.texture_sidecar = "texture_" + key + ".vdt";
  rec.loss_trace = "loss_trace_" + key + ".csv";
  surrogate::write_ppm((fs::path(out_dir) / rec.texture_ppm).string(), result.texture);
  surrogate::write_sidecar((fs::path(out_dir) / rec.texture_sidecar).string(), result.texture);
  write_trace_csv((fs::path(out_dir) / rec.loss_trace).string(), result.trace);
}

ExperimentRecord run_one(const scene::ScenarioSequence& seq, const ExperimentConfig& cfg,
                         std::uint64_t seed, std::uint64_t det_seed,
                         const std::string& pipe_name, const RunTweaks& tw,
                         attack::OptimizeResult* result_out = nullptr,
                         Prepared* prep_out = nullptr) {
  ExperimentRecord rec;
  rec.scenario_id = seq.id;
  rec.category = seq.category;
  rec.group = tw.group;
  rec.seed = seed;
  rec.detector_seed = det_seed;
  rec.pipeline = pipe_name;
  try {
    auto pipeline = pipeline_by_name(pipe_name, seq.maneuver, seq.dt);
    Prepared prep = prepare(seq, cfg, pipeline, tw.skip_vaf);
    if (prep_out) *prep_out = prep;
    if (!prep.reject.empty()) {
      rec.status = prep.reject;
      return rec;
    }
    rec.window_first = prep.first;
    rec.variation = prep.variation;
    rec.target = prep.target;

    surrogate::DetectorParams dp = cfg.detector;
    dp.seed = det_seed;
    surrogate::SurrogateDetector det(dp);

    attack::TrainScenario unit;
    unit.window = prep.window;
    unit.target = prep.target;
    unit.atlas = surrogate::FaceAtlas::build(cfg.tex_h, cfg.tex_w, seq.target_spec);

    attack::OptimizerParams op = cfg.opt;
    op.seed = split_seed(seed, kSpecificStream, hash_id(seq.id));
    auto result =
        attack::optimize({unit}, det, cfg.eval, cfg.weights, attack::default_palette(), op);

    auto outcome = evaluate_window(result.texture, unit.atlas, prep.window, prep.path,
                                   prep.target, det, cfg, pipeline);
    fill_record(rec, outcome, pipeline.planner.hard_brake_threshold);
    save_artifacts(rec, result, cfg.out_dir);
    if (result_out) *result_out = std::move(result);
  } catch (const std::exception& e) {
    rec.status = std::string("error:") + sanitize(e.what());
  }
  return rec;
}

// One attackable bank entry with its precomputed filter/goal state.
struct Item {
  scene::ScenarioSequence seq;
  downstream::PipelineConfig pipeline;
  Prepared prep;
  int fold = -1;
};

std::vector<Item> collect_usable(const std::vector<scene::ScenarioSequence>& bank,
                                 const ExperimentConfig& cfg, std::uint64_t seed,
                                 std::uint64_t det_seed, const std::string& pipe_name,
                                 std::vector<ExperimentRecord>& rejects) {
  std::vector<Item> usable;
  for (const auto& seq : bank) {
    ExperimentRecord rec;
    rec.scenario_id = seq.id;
    rec.category = seq.category;
    rec.seed = seed;
    rec.detector_seed = det_seed;
    rec.pipeline = pipe_name;
    Item it;
    it.seq = seq;
    try {
      it.pipeline = pipeline_by_name(pipe_name, seq.maneuver, seq.dt);
      it.prep = prepare(seq, cfg, it.pipeline, false);
    } catch (const std::exception& e) {
      rec.status = std::string("error:") + sanitize(e.what());
      rejects.push_back(std::move(rec));
      continue;
    }
    if (!it.prep.reject.empty()) {
      rec.status = it.prep.reject;
      rejects.push_back(std::move(rec));
      continue;
    }
    usable.push_back(std::move(it));
  }
  return usable;
}

const surrogate::FaceAtlas& cached_atlas(std::map<std::string, surrogate::FaceAtlas>& cache,
                                         const ExperimentConfig& cfg,
                                         const scene::VehicleSpec& spec) {
  std::string key = spec.type + "/" + kv::fmt(spec.length) + "/" + kv::fmt(spec.width) + "/" +
                    kv::fmt(spec.height);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, surrogate::FaceAtlas::build(cfg.tex_h, cfg.tex_w, spec)).first;
  return it->second;
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.setting != "specific" && cfg.setting != "cv")
    throw InvalidInput("config: setting must be specific or cv");
  if (cfg.folds < 2) throw InvalidInput("config: folds must be >= 2");
  if (cfg.seeds.empty() || cfg.detector_seeds.empty() || cfg.pipelines.empty())
    throw InvalidInput("config: seeds, detector_seeds and pipelines must be non-empty");
  for (const auto& p : cfg.pipelines)
    if (p != "A" && p != "B") throw InvalidInput("config: unknown pipeline " + p);
  if (cfg.tex_h <= 0 || cfg.tex_w <= 0) throw InvalidInput("config: texture dims must be positive");
  if (cfg.window < 2) throw InvalidInput("config: window must span at least 2 frames");
  if (cfg.theta_min < 0.0) throw InvalidInput("config: theta_min must be >= 0");
  if (cfg.eval.temporal_adapt < 0.0 || cfg.eval.temporal_adapt > 1.0)
    throw InvalidInput("config: temporal_adapt must be in [0, 1]");
  if (cfg.eval.reference_area <= 0.0) throw InvalidInput("config: reference_area must be positive");
  if (cfg.eval.smear_coeff < 0.0) throw InvalidInput("config: smear_coeff must be >= 0");
  if (cfg.weights.move < 0.0 || cfg.weights.prog < 0.0 || cfg.weights.fid < 0.0 ||
      cfg.weights.tv < 0.0 || cfg.weights.nps < 0.0)
    throw InvalidInput("config: loss weights must be >= 0");
  if (cfg.opt.lr <= 0.0 || cfg.opt.steps < 1 || cfg.opt.eot_samples < 1 ||
      cfg.opt.trace_every < 1)
    throw InvalidInput("config: bad optimizer parameters");
  if (cfg.detector.kappa <= 0.0 || cfg.detector.gain <= 0.0 || cfg.detector.yaw_scale < 0.0 ||
      cfg.detector.dim_scale < 0.0)
    throw InvalidInput("config: bad response-head parameters");
  if (cfg.eval_eot_draws < 1) throw InvalidInput("config: eval_eot_draws must be >= 1");
  if (cfg.bank_count < 0) throw InvalidInput("config: bank_count must be >= 0");
  if (cfg.jobs < 1) throw InvalidInput("config: jobs must be >= 1");
}

ExperimentConfig read_config(const std::string& path) {
  kv::Doc doc = kv::read_file(path);
  static const char* const kKnown[] = {
      "setting",        "folds",       "seeds",        "detector_seeds", "pipelines",
      "tex_h",          "tex_w",       "window",       "theta_min",      "temporal_adapt",
      "reference_area", "smear_coeff", "w_move",       "w_prog",         "w_fid",
      "w_tv",           "w_nps",       "lr",           "beta1",          "beta2",
      "eps",            "steps",       "eot_samples",  "use_eot",        "eot_yaw",
      "eot_translation", "eot_depth",  "eot_scale",    "opt_seed",       "trace_every",
      "kappa",          "yaw_scale",   "dim_scale",    "gain",           "eval_eot_draws",
      "bank_seed",      "bank_count",  "out_dir",      "jobs"};
  for (const auto& [key, toks] : doc.lines) {
    (void)toks;
    bool known = false;
    for (const char* k : kKnown)
      if (key == k) {
        known = true;
        break;
      }
    if (!known) throw InvalidInput("config: unknown key " + key);
  }

  ExperimentConfig cfg;
  cfg.setting = doc.str_or("setting", cfg.setting);
  cfg.folds = as_int(doc, "folds", cfg.folds);
  auto read_u64s = [&doc](const char* key, std::vector<std::uint64_t>& dst) {
    if (const auto* toks = doc.find(key)) {
      if (toks->empty()) throw InvalidInput(std::string("config: empty list for ") + key);
      dst.clear();
      for (const auto& t : *toks) dst.push_back(parse_u64(t));
    }
  };
  read_u64s("seeds", cfg.seeds);
  read_u64s("detector_seeds", cfg.detector_seeds);
  if (const auto* toks = doc.find("pipelines")) {
    if (toks->empty()) throw InvalidInput("config: empty list for pipelines");
    cfg.pipelines = *toks;
  }
  cfg.tex_h = as_int(doc, "tex_h", cfg.tex_h);
  cfg.tex_w = as_int(doc, "tex_w", cfg.tex_w);
  cfg.window = as_int(doc, "window", cfg.window);
  cfg.theta_min = doc.num_or("theta_min", cfg.theta_min);
  cfg.eval.temporal_adapt = doc.num_or("temporal_adapt", cfg.eval.temporal_adapt);
  cfg.eval.reference_area = doc.num_or("reference_area", cfg.eval.reference_area);
  cfg.eval.smear_coeff = doc.num_or("smear_coeff", cfg.eval.smear_coeff);
  cfg.weights.move = doc.num_or("w_move", cfg.weights.move);
  cfg.weights.prog = doc.num_or("w_prog", cfg.weights.prog);
  cfg.weights.fid = doc.num_or("w_fid", cfg.weights.fid);
  cfg.weights.tv = doc.num_or("w_tv", cfg.weights.tv);
  cfg.weights.nps = doc.num_or("w_nps", cfg.weights.nps);
  cfg.opt.lr = doc.num_or("lr", cfg.opt.lr);
  cfg.opt.beta1 = doc.num_or("beta1", cfg.opt.beta1);
  cfg.opt.beta2 = doc.num_or("beta2", cfg.opt.beta2);
  cfg.opt.eps = doc.num_or("eps", cfg.opt.eps);
  cfg.opt.steps = as_int(doc, "steps", cfg.opt.steps);
  cfg.opt.eot_samples = as_int(doc, "eot_samples", cfg.opt.eot_samples);
  cfg.opt.use_eot = as_int(doc, "use_eot", cfg.opt.use_eot ? 1 : 0) != 0;
  cfg.opt.ranges.yaw = doc.num_or("eot_yaw", cfg.opt.ranges.yaw);
  cfg.opt.ranges.translation = doc.num_or("eot_translation", cfg.opt.ranges.translation);
  cfg.opt.ranges.depth = doc.num_or("eot_depth", cfg.opt.ranges.depth);
  cfg.opt.ranges.scale = doc.num_or("eot_scale", cfg.opt.ranges.scale);
  if (doc.has("opt_seed")) cfg.opt.seed = parse_u64(doc.str("opt_seed"));
  cfg.opt.trace_every = as_int(doc, "trace_every", cfg.opt.trace_every);
  cfg.detector.kappa = doc.num_or("kappa", cfg.detector.kappa);
  cfg.detector.yaw_scale = doc.num_or("yaw_scale", cfg.detector.yaw_scale);
  cfg.detector.dim_scale = doc.num_or("dim_scale", cfg.detector.dim_scale);
  cfg.detector.gain = doc.num_or("gain", cfg.detector.gain);
  cfg.eval_eot_draws = as_int(doc, "eval_eot_draws", cfg.eval_eot_draws);
  if (doc.has("bank_seed")) cfg.bank_seed = parse_u64(doc.str("bank_seed"));
  cfg.bank_count = as_int(doc, "bank_count", cfg.bank_count);
  cfg.out_dir = doc.str_or("out_dir", cfg.out_dir);
  cfg.jobs = as_int(doc, "jobs", cfg.jobs);
  validate_config(cfg);
  return cfg;
}

void write_config(const std::string& path, const ExperimentConfig& cfg) {
  kv::Doc doc;
  doc.add("setting", cfg.setting);
  doc.add_num("folds", cfg.folds);
  auto u64s = [](const std::vector<std::uint64_t>& vs) {
    std::vector<std::string> toks;
    toks.reserve(vs.size());
    for (auto v : vs) toks.push_back(std::to_string(v));
    return toks;
  };
  doc.add("seeds", u64s(cfg.seeds));
  doc.add("detector_seeds", u64s(cfg.detector_seeds));
  doc.add("pipelines", cfg.pipelines);
  doc.add_num("tex_h", cfg.tex_h);
  doc.add_num("tex_w", cfg.tex_w);
  doc.add_num("window", cfg.window);
  doc.add_num("theta_min", cfg.theta_min);
  doc.add_num("temporal_adapt", cfg.eval.temporal_adapt);
  doc.add_num("reference_area", cfg.eval.reference_area);
  doc.add_num("smear_coeff", cfg.eval.smear_coeff);
  doc.add_num("w_move", cfg.weights.move);
  doc.add_num("w_prog", cfg.weights.prog);
  doc.add_num("w_fid", cfg.weights.fid);
  doc.add_num("w_tv", cfg.weights.tv);
  doc.add_num("w_nps", cfg.weights.nps);
  doc.add_num("lr", cfg.opt.lr);
  doc.add_num("beta1", cfg.opt.beta1);
  doc.add_num("beta2", cfg.opt.beta2);
  doc.add_num("eps", cfg.opt.eps);
  doc.add_num("steps", cfg.opt.steps);
  doc.add_num("eot_samples", cfg.opt.eot_samples);
  doc.add_num("use_eot", cfg.opt.use_eot ? 1 : 0);
  doc.add_num("eot_yaw", cfg.opt.ranges.yaw);
  doc.add_num("eot_translation", cfg.opt.ranges.translation);
  doc.add_num("eot_depth", cfg.opt.ranges.depth);
  doc.add_num("eot_scale", cfg.opt.ranges.scale);
  doc.add("opt_seed", std::to_string(cfg.opt.seed));
  doc.add_num("trace_every", cfg.opt.trace_every);
  doc.add_num("kappa", cfg.detector.kappa);
  doc.add_num("yaw_scale", cfg.detector.yaw_scale);
  doc.add_num("dim_scale", cfg.detector.dim_scale);
  doc.add_num("gain", cfg.detector.gain);
  doc.add_num("eval_eot_draws", cfg.eval_eot_draws);
  doc.add("bank_seed", std::to_string(cfg.bank_seed));
  doc.add_num("bank_count", cfg.bank_count);
  if (!cfg.out_dir.empty()) doc.add("out_dir", cfg.out_dir);
  doc.add_num("jobs", cfg.jobs);
  kv::write_file(path, doc);
}

downstream::PipelineConfig pipeline_by_name(const std::string& name, scene::Maneuver maneuver,
                                            double dt) {
  downstream::PipelineConfig pc;
  if (name == "A")
    pc = downstream::pipeline_a();
  else if (name == "B")
    pc = downstream::pipeline_b();
  else
    throw InvalidInput("unknown pipeline: " + name);
  pc.tracker.dt = dt;
  pc.planner.dt = dt;
  pc.planner.overtake_intent = maneuver == scene::Maneuver::kOvertake;
  return pc;
}

Prepared prepare(const scene::ScenarioSequence& seq, const ExperimentConfig& cfg,
                 const downstream::PipelineConfig& pipeline, bool skip_vaf) {
  Prepared out;
  scene::validate(seq);
  const auto k = static_cast<std::size_t>(cfg.window);
  auto full_path = planned_ego_path(seq, 0, pipeline.planner.horizon);
  if (!attack::aff_filter(seq, full_path, pipeline, attack::AffParams{})) {
    out.reject = "rejected:aff";
    return out;
  }
  if (seq.length() < k) {
    out.reject = "rejected:vaf";
    return out;
  }
  if (skip_vaf) {
    // No variation screening: the window lands on an arbitrary (but
    // reproducible) admissible start instead of the strongest view sweep.
    const std::uint64_t span = seq.length() - k + 1;
    out.first = static_cast<std::size_t>(split_seed(hash_id(seq.id), kWindowStream) % span);
    out.variation = scene::viewing_angle_variation(seq, out.first, out.first + k - 1);
  } else {
    auto win = attack::vaf_filter(seq, k, cfg.theta_min);
    if (!win) {
      out.reject = "rejected:vaf";
      return out;
    }
    out.first = win->first;
    out.variation = win->variation;
  }
  out.window = attack::slice(seq, out.first, k);
  out.path = planned_ego_path(out.window, k - 1, pipeline.planner.horizon);
  out.target = attack::search_target(out.window, out.path, pipeline, attack::direction_grid(),
                                     attack::step_grid());
  return out;
}

WindowOutcome evaluate_window(const surrogate::Texture& tex, const surrogate::FaceAtlas& atlas,
                              const scene::ScenarioSequence& window,
                              const downstream::Trajectory& path,
                              const attack::AttackTarget& target,
                              const surrogate::SurrogateDetector& det,
                              const ExperimentConfig& cfg,
                              const downstream::PipelineConfig& pipeline) {
  WindowOutcome out;
  const std::size_t k = window.length();
  if (k == 0) throw InvalidInput("evaluate_window: empty window");
  surrogate::Texture base = attack::base_texture(tex.h, tex.w);

  std::vector<double> sum(k, 0.0);
  std::vector<double> draw_finals;
  draw_finals.reserve(static_cast<std::size_t>(cfg.eval_eot_draws));
  const std::uint64_t base_seed = hash_id(window.id);
  for (int i = 0; i < cfg.eval_eot_draws; ++i) {
    Rng rng(split_seed(base_seed, kEvalStream, static_cast<std::uint64_t>(i)));
    surrogate::EotSample s = surrogate::sample_eot(cfg.opt.ranges, rng);
    auto clean = attack::evaluate_sequence(base, atlas, window, det, cfg.eval, &s);
    auto attacked = attack::evaluate_sequence(tex, atlas, window, det, cfg.eval, &s);
    auto d = attack::displacement_series(clean, attacked, target.u);
    for (std::size_t j = 0; j < k; ++j) sum[j] += d[j];
    draw_finals.push_back(d.back());
  }
  out.displacements.resize(k);
  double mean_d = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    out.displacements[j] = sum[j] / static_cast<double>(cfg.eval_eot_draws);
    mean_d += out.displacements[j];
  }
  out.mean_d = mean_d / static_cast<double>(k);
  out.progressive = metrics::progressive(out.displacements);
  try {
    out.cv = metrics::cv(draw_finals);
  } catch (const UndefinedMetric&) {
    out.cv = std::numeric_limits<double>::quiet_NaN();
  }

  auto clean_nom = attack::evaluate_sequence(base, atlas, window, det, cfg.eval, nullptr);
  auto attacked_nom = attack::evaluate_sequence(tex, atlas, window, det, cfg.eval, nullptr);
  auto clean_dets = clean_nom.detections();
  auto attacked_dets = attacked_nom.detections();
  const double t_now = window.frames.back().t;
  auto clean_track = downstream::track_sequence(clean_dets, pipeline.tracker);
  auto attacked_track = downstream::track_sequence(attacked_dets, pipeline.tracker);
  auto clean_pred =
      downstream::predict_trajectory(clean_track, t_now, pipeline.planner.horizon,
                                     pipeline.planner.dt);
  auto attacked_pred =
      downstream::predict_trajectory(attacked_track, t_now, pipeline.planner.horizon,
                                     pipeline.planner.dt);
  out.ape = metrics::ape(clean_pred, attacked_pred);
  out.mtd = metrics::mtd(attacked_pred, path);
  const auto& ego_frame = window.frames.back();
  auto clean_plan = downstream::plan(ego_frame, path, clean_pred, pipeline.planner);
  auto attacked_plan = downstream::plan(ego_frame, path, attacked_pred, pipeline.planner);
  out.mbd = metrics::mbd(attacked_plan);
  out.e_plan = downstream::planning_error(clean_plan, attacked_plan, pipeline.w_mtd);
  out.hard_brake = attacked_plan.hard_brake;
  out.overtake_abandoned = attacked_plan.overtake_abandoned;
  double b = 0.0;
  for (std::size_t j = 0; j < k; ++j) b += metrics::bfs(clean_dets[j], attacked_dets[j]);
  out.bfs = b / static_cast<double>(k);
  return out;
}

ExperimentRecord run_specific(const scene::ScenarioSequence& seq, const ExperimentConfig& cfg,
                              std::uint64_t seed, std::uint64_t detector_seed,
                              const std::string& pipeline_name) {
  validate_config(cfg);
  std::string scn_file;
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    scn_file = "scenario_" + seq.id + ".scn";
    scene::write_scn((fs::path(cfg.out_dir) / scn_file).string(), seq);
  }
  ExperimentRecord rec = run_one(seq, cfg, seed, detector_seed, pipeline_name, RunTweaks{});
  rec.scenario_file = scn_file;
  return rec;
}

std::vector<ExperimentRecord> run_specific_suite(const std::vector<scene::ScenarioSequence>& seqs,
                                                 const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<std::string> scn_files(seqs.size());
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      scn_files[i] = "scenario_" + seqs[i].id + ".scn";
      scene::write_scn((fs::path(cfg.out_dir) / scn_files[i]).string(), seqs[i]);
    }
  }
  struct Job {
    std::size_t seq, seed, det, pipe;
  };
  std::vector<Job> jobs;
  jobs.reserve(seqs.size() * cfg.seeds.size() * cfg.detector_seeds.size() *
               cfg.pipelines.size());
  for (std::size_t i = 0; i < seqs.size(); ++i)
    for (std::size_t a = 0; a < cfg.seeds.size(); ++a)
      for (std::size_t b = 0; b < cfg.detector_seeds.size(); ++b)
        for (std::size_t c = 0; c < cfg.pipelines.size(); ++c) jobs.push_back({i, a, b, c});
  std::vector<ExperimentRecord> records(jobs.size());
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t j) {
    const Job& job = jobs[j];
    records[j] = run_one(seqs[job.seq], cfg, cfg.seeds[job.seed], cfg.detector_seeds[job.det],
                         cfg.pipelines[job.pipe], RunTweaks{});
    records[j].scenario_file = scn_files[job.seq];
  });
  return records;
}

CrossValidationResult run_cross_validation(const std::vector<scene::ScenarioSequence>& bank,
                                           const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
  const std::uint64_t seed = cfg.seeds.front();
  const std::uint64_t det_seed = cfg.detector_seeds.front();
  const std::string& pipe_name = cfg.pipelines.front();

  CrossValidationResult out;
  auto usable = collect_usable(bank, cfg, seed, det_seed, pipe_name, out.records);

  std::vector<std::size_t> order(usable.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(split_seed(seed, kFoldShuffleStream));
  shuffle(order, shuffle_rng);
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    usable[order[pos]].fold = static_cast<int>(pos % static_cast<std::size_t>(cfg.folds));

  const auto nf = static_cast<std::size_t>(cfg.folds);
  std::vector<std::vector<ExperimentRecord>> fold_records(nf);
  std::vector<FoldSummary> folds(nf);
  parallel_for(nf, cfg.jobs, [&](std::size_t f) {
    FoldSummary& fsum = folds[f];
    fsum.fold = static_cast<int>(f);
    std::vector<const Item*> train, test;
    for (const auto& it : usable) (it.fold == static_cast<int>(f) ? test : train).push_back(&it);
    fsum.train_size = static_cast<int>(train.size());
    fsum.test_size = static_cast<int>(test.size());
    auto base_record = [&](const Item& it) {
      ExperimentRecord rec;
      rec.scenario_id = it.seq.id;
      rec.category = it.seq.category;
      rec.fold = static_cast<int>(f);
      rec.seed = seed;
      rec.detector_seed = det_seed;
      rec.pipeline = pipe_name;
      rec.window_first = it.prep.first;
      rec.variation = it.prep.variation;
      return rec;
    };
    auto reject_all = [&](const std::string& status) {
      for (const Item* it : test) {
        ExperimentRecord rec = base_record(*it);
        rec.status = status;
        fold_records[f].push_back(std::move(rec));
      }
    };
    if (train.empty() || test.empty()) {
      fsum.skipped = true;
      reject_all("skipped:empty_fold");
      return;
    }
    std::vector<attack::AttackTarget> goals;
    goals.reserve(train.size());
    for (const Item* it : train) goals.push_back(it->prep.target);
    attack::AttackTarget group;
    try {
      group = attack::group_target(goals);
    } catch (const DegenerateGroup&) {
      fsum.skipped = true;
      reject_all("skipped:degenerate_group");
      return;
    }
    fsum.group = group;

    std::map<std::string, surrogate::FaceAtlas> atlas_cache;
    std::vector<attack::TrainScenario> units;
    units.reserve(train.size());
    for (const Item* it : train) {
      attack::TrainScenario u;
      u.window = it->prep.window;
      u.target = attack::AttackTarget{group.u, group.s, 0.0};
      u.atlas = cached_atlas(atlas_cache, cfg, it->seq.target_spec);
      units.push_back(std::move(u));
    }
    surrogate::DetectorParams dp = cfg.detector;
    dp.seed = det_seed;
    surrogate::SurrogateDetector det(dp);
    attack::OptimizerParams op = cfg.opt;
    op.seed = split_seed(seed, kFoldOptStream, f);
    attack::OptimizeResult result;
    try {
      result = attack::optimize(units, det, cfg.eval, cfg.weights, attack::default_palette(), op);
    } catch (const std::exception& e) {
      fsum.skipped = true;
      reject_all(std::string("error:") + sanitize(e.what()));
      return;
    }

    std::string tex_ppm, tex_vdt, trace_csv;
    if (!cfg.out_dir.empty()) {
      const std::string key = "fold" + std::to_string(f) + "_s" + std::to_string(seed);
      tex_ppm = "texture_" + key + ".ppm";
      tex_vdt = "texture_" + key + ".vdt";
      trace_csv = "loss_trace_" + key + ".csv";
      surrogate::write_ppm((fs::path(cfg.out_dir) / tex_ppm).string(), result.texture);
      surrogate::write_sidecar((fs::path(cfg.out_dir) / tex_vdt).string(), result.texture);
      write_trace_csv((fs::path(cfg.out_dir) / trace_csv).string(), result.trace);
    }
    for (const Item* it : test) {
      ExperimentRecord rec = base_record(*it);
      try {
        attack::AttackTarget goal{group.u, group.s, 0.0};
        goal.e_plan = attack::search_target(it->prep.window, it->prep.path, it->pipeline,
                                            {group.u}, {group.s})
                          .e_plan;
        rec.target = goal;
        auto outcome =
            evaluate_window(result.texture, cached_atlas(atlas_cache, cfg, it->seq.target_spec),
                            it->prep.window, it->prep.path, goal, det, cfg, it->pipeline);
        fill_record(rec, outcome, it->pipeline.planner.hard_brake_threshold);
        rec.texture_ppm = tex_ppm;
        rec.texture_sidecar = tex_vdt;
        rec.loss_trace = trace_csv;
      } catch (const std::exception& e) {
        rec.status = std::string("error:") + sanitize(e.what());
      }
      fold_records[f].push_back(std::move(rec));
    }
  });
  for (auto& fr : fold_records)
    for (auto& r : fr) out.records.push_back(std::move(r));
  out.folds = std::move(folds);
  return out;
}

std::vector<ExperimentRecord> run_factor_sweep(const std::string& factor, int per_level,
                                               const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (per_level <= 0) throw InvalidInput("factor sweep: per_level must be positive");
  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
  std::vector<scene::ScenarioSequence> seqs;
  std::vector<std::string> groups;
  for (int level = 0; level < 2; ++level) {
    ScenarioTemplate tpl = sweep_template(factor, level);
    auto batch = generate_scenarios(tpl, per_level,
                                    split_seed(cfg.bank_seed, kSweepStream,
                                               static_cast<std::uint64_t>(level)));
    for (std::size_t i = 0; i < batch.size(); ++i) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "SWEEP-%s-L%d-%03d", factor.c_str(), level,
                    static_cast<int>(i));
      batch[i].id = buf;
      seqs.push_back(std::move(batch[i]));
      groups.push_back(factor + (level == 0 ? "=low" : "=high"));
    }
  }
  std::vector<std::string> scn_files(seqs.size());
  if (!cfg.out_dir.empty())
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      scn_files[i] = "scenario_" + seqs[i].id + ".scn";
      scene::write_scn((fs::path(cfg.out_dir) / scn_files[i]).string(), seqs[i]);
    }
  std::vector<ExperimentRecord> records(seqs.size());
  parallel_for(seqs.size(), cfg.jobs, [&](std::size_t i) {
    RunTweaks tw;
    tw.group = groups[i];
    records[i] = run_one(seqs[i], cfg, cfg.seeds.front(), cfg.detector_seeds.front(),
                         cfg.pipelines.front(), tw);
    records[i].scenario_file = scn_files[i];
  });
  return records;
}

AblationResult run_ablation(const std::vector<scene::ScenarioSequence>& suite,
                            const std::vector<std::string>& toggles, const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
  std::vector<std::string> rows{"full"};
  rows.insert(rows.end(), toggles.begin(), toggles.end());

  std::vector<ExperimentConfig> cfgs;
  std::vector<RunTweaks> tws;
  for (const auto& name : rows) {
    ExperimentConfig c = cfg;
    RunTweaks tw;
    tw.group = "ablate=" + name;
    if (name == "full") {
    } else if (name == "vaf") {
      tw.skip_vaf = true;
    } else if (name == "eot") {
      c.opt.use_eot = false;
    } else if (name == "move") {
      c.weights.move = 0.0;
    } else if (name == "prog") {
      c.weights.prog = 0.0;
    } else if (name == "fid") {
      c.weights.fid = 0.0;
    } else if (name == "style") {
      c.weights.tv = 0.0;
      c.weights.nps = 0.0;
    } else {
      throw InvalidInput("unknown ablation toggle: " + name);
    }
    cfgs.push_back(std::move(c));
    tws.push_back(std::move(tw));
  }

  AblationResult out;
  out.records.resize(rows.size() * suite.size());
  parallel_for(out.records.size(), cfg.jobs, [&](std::size_t j) {
    const std::size_t r = j / suite.size();
    const std::size_t i = j % suite.size();
    out.records[j] = run_one(suite[i], cfgs[r], cfg.seeds.front(), cfg.detector_seeds.front(),
                             cfg.pipelines.front(), tws[r]);
  });
  for (std::size_t r = 0; r < rows.size(); ++r) {
    AblationRow row;
    row.name = rows[r];
    int n = 0, ncv = 0;
    double d3 = 0.0, cvv = 0.0, pdr = 0.0, bfs = 0.0, asr = 0.0;
    for (std::size_t i = 0; i < suite.size(); ++i) {
      const auto& rec = out.records[r * suite.size() + i];
      if (!rec.ok()) continue;
      ++n;
      d3 += rec.report.d3;
      pdr += rec.report.pdr;
      bfs += rec.report.bfs;
      asr += rec.report.asr;
      if (std::isfinite(rec.report.cv)) {
        cvv += rec.report.cv;
        ++ncv;
      }
    }
    if (n > 0) {
      row.d3 = d3 / n;
      row.pdr = pdr / n;
      row.bfs = bfs / n;
      row.asr = asr / n;
    }
    if (ncv > 0) row.cv = cvv / ncv;
    out.rows.push_back(std::move(row));
  }
  return out;
}

TransferResult run_detector_transfer(const scene::ScenarioSequence& seq,
                                     const ExperimentConfig& cfg, std::uint64_t source_seed,
                                     std::uint64_t target_seed) {
  validate_config(cfg);
  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
  TransferResult out;
  attack::OptimizeResult result;
  Prepared prep;
  RunTweaks tw;
  tw.group = "transfer=src";
  out.source =
      run_one(seq, cfg, cfg.seeds.front(), source_seed, cfg.pipelines.front(), tw, &result, &prep);
  out.target = out.source;
  out.target.group = "transfer=dst";
  out.target.detector_seed = target_seed;
  if (!out.source.ok()) {
    out.target.status = out.source.status;
    return out;
  }
  try {
    surrogate::DetectorParams dp = cfg.detector;
    dp.seed = target_seed;
    surrogate::SurrogateDetector det(dp);
    auto pipeline = pipeline_by_name(cfg.pipelines.front(), seq.maneuver, seq.dt);
    auto atlas = surrogate::FaceAtlas::build(cfg.tex_h, cfg.tex_w, seq.target_spec);
    auto outcome = evaluate_window(result.texture, atlas, prep.window, prep.path, prep.target,
                                   det, cfg, pipeline);
    fill_record(out.target, outcome, pipeline.planner.hard_brake_threshold);
    out.target.status = "ok";
  } catch (const std::exception& e) {
    out.target.status = std::string("error:") + sanitize(e.what());
  }
  return out;
}

TransferResult run_vehicle_transfer(const scene::ScenarioSequence& seq,
                                    const ExperimentConfig& cfg, const std::string& target_type) {
  validate_config(cfg);
  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
  TransferResult out;
  attack::OptimizeResult result;
  Prepared prep;
  RunTweaks tw;
  tw.group = "transfer=src";
  out.source = run_one(seq, cfg, cfg.seeds.front(), cfg.detector_seeds.front(),
                       cfg.pipelines.front(), tw, &result, &prep);

  scene::ScenarioSequence dst = seq;
  dst.target_spec = scene::catalogue(target_type);
  auto dash = seq.category.find('-');
  dst.category = dash == std::string::npos ? target_type : target_type + seq.category.substr(dash);
  dst.id = seq.id + "-X" + target_type;

  out.target.scenario_id = dst.id;
  out.target.category = dst.category;
  out.target.group = "transfer=dst";
  out.target.seed = cfg.seeds.front();
  out.target.detector_seed = cfg.detector_seeds.front();
  out.target.pipeline = cfg.pipelines.front();
  if (!out.source.ok()) {
    out.target.status = out.source.status;
    return out;
  }
  try {
    auto pipeline = pipeline_by_name(cfg.pipelines.front(), dst.maneuver, dst.dt);
    Prepared dprep = prepare(dst, cfg, pipeline, false);
    if (!dprep.reject.empty()) {
      out.target.status = dprep.reject;
      return out;
    }
    out.target.window_first = dprep.first;
    out.target.variation = dprep.variation;
    out.target.target = dprep.target;
    auto src_atlas = surrogate::FaceAtlas::build(cfg.tex_h, cfg.tex_w, seq.target_spec);
    auto dst_atlas = surrogate::FaceAtlas::build(cfg.tex_h, cfg.tex_w, dst.target_spec);
    auto remapped = surrogate::remap(result.texture, src_atlas, dst_atlas);
    surrogate::DetectorParams dp = cfg.detector;
    dp.seed = cfg.detector_seeds.front();
    surrogate::SurrogateDetector det(dp);
    auto outcome = evaluate_window(remapped, dst_atlas, dprep.window, dprep.path, dprep.target,
                                   det, cfg, pipeline);
    fill_record(out.target, outcome, pipeline.planner.hard_brake_threshold);
    if (!cfg.out_dir.empty()) {
      const std::string key = run_key(out.target);
      out.target.texture_ppm = "texture_" + key + ".ppm";
      out.target.texture_sidecar = "texture_" + key + ".vdt";
      surrogate::write_ppm((fs::path(cfg.out_dir) / out.target.texture_ppm).string(), remapped);
      surrogate::write_sidecar((fs::path(cfg.out_dir) / out.target.texture_sidecar).string(),
                               remapped);
    }
  } catch (const std::exception& e) {
    out.target.status = std::string("error:") + sanitize(e.what());
  }
  return out;
}

SizeSweepResult run_training_size_sweep(int test_size, const std::vector<int>& train_sizes,
                                        const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (test_size <= 0) throw InvalidInput("size sweep: test_size must be positive");
  if (!cfg.out_dir.empty()) fs::create_directories(cfg.out_dir);
  auto bank = standard_bank(cfg.bank_seed);
  if (static_cast<int>(bank.size()) > cfg.bank_count) bank.resize(cfg.bank_count);
  const std::uint64_t seed = cfg.seeds.front();
  const std::uint64_t det_seed = cfg.detector_seeds.front();
  const std::string& pipe_name = cfg.pipelines.front();

  SizeSweepResult out;
  auto usable = collect_usable(bank, cfg, seed, det_seed, pipe_name, out.records);
  std::vector<std::size_t> order(usable.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(split_seed(seed, kSizeShuffleStream));
  shuffle(order, shuffle_rng);
  if (static_cast<std::size_t>(test_size) >= order.size())
    throw InvalidInput("size sweep: test split exhausts the usable scenarios");
  std::vector<const Item*> test, pool;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const Item* it = &usable[order[pos]];
    if (pos < static_cast<std::size_t>(test_size))
      test.push_back(it);
    else
      pool.push_back(it);
  }
  for (const Item* it : test) out.test_ids.push_back(it->seq.id);

  surrogate::DetectorParams dp = cfg.detector;
  dp.seed = det_seed;
  surrogate::SurrogateDetector det(dp);
  std::map<std::string, surrogate::FaceAtlas> atlas_cache;

  for (int t : train_sizes) {
    if (t < 1 || static_cast<std::size_t>(t) > pool.size())
      throw InvalidInput("size sweep: train size out of range: " + std::to_string(t));
    const std::string group_label = "train=" + std::to_string(t);
    SizePoint point;
    point.train_size = t;
    std::vector<attack::AttackTarget> goals;
    for (int i = 0; i < t; ++i) goals.push_back(pool[static_cast<std::size_t>(i)]->prep.target);
    attack::AttackTarget group;
    bool degenerate = false;
    try {
      group = attack::group_target(goals);
    } catch (const DegenerateGroup&) {
      degenerate = true;
    }
    if (degenerate) {
      for (const Item* it : test) {
        ExperimentRecord rec;
        rec.scenario_id = it->seq.id;
        rec.category = it->seq.category;
        rec.group = group_label;
        rec.seed = seed;
        rec.detector_seed = det_seed;
        rec.pipeline = pipe_name;
        rec.status = "skipped:degenerate_group";
        out.records.push_back(std::move(rec));
      }
      point.mean_d3 = std::numeric_limits<double>::quiet_NaN();
      point.pdr = std::numeric_limits<double>::quiet_NaN();
      out.points.push_back(point);
      continue;
    }
    std::vector<attack::TrainScenario> units;
    units.reserve(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) {
      const Item* it = pool[static_cast<std::size_t>(i)];
      attack::TrainScenario u;
      u.window = it->prep.window;
      u.target = attack::AttackTarget{group.u, group.s, 0.0};
      u.atlas = cached_atlas(atlas_cache, cfg, it->seq.target_spec);
      units.push_back(std::move(u));
    }
    attack::OptimizerParams op = cfg.opt;
    op.seed = split_seed(seed, kSizeOptStream, static_cast<std::uint64_t>(t));
    auto result = attack::optimize(units, det, cfg.eval, cfg.weights, attack::default_palette(), op);

    int n = 0;
    double d3 = 0.0, pdr = 0.0;
    for (const Item* it : test) {
      ExperimentRecord rec;
      rec.scenario_id = it->seq.id;
      rec.category = it->seq.category;
      rec.group = group_label;
      rec.seed = seed;
      rec.detector_seed = det_seed;
      rec.pipeline = pipe_name;
      rec.window_first = it->prep.first;
      rec.variation = it->prep.variation;
      try {
        attack::AttackTarget goal{group.u, group.s, 0.0};
        rec.target = goal;
        auto outcome =
            evaluate_window(result.texture, cached_atlas(atlas_cache, cfg, it->seq.target_spec),
                            it->prep.window, it->prep.path, goal, det, cfg, it->pipeline);
        fill_record(rec, outcome, it->pipeline.planner.hard_brake_threshold);
        ++n;
        d3 += rec.report.d3;
        pdr += rec.report.pdr;
      } catch (const std::exception& e) {
        rec.status = std::string("error:") + sanitize(e.what());
      }
      out.records.push_back(std::move(rec));
    }
    if (n > 0) {
      point.mean_d3 = d3 / n;
      point.pdr = pdr / n;
    }
    out.points.push_back(point);
  }
  return out;
}

}  // namespace viewdrift::harness
