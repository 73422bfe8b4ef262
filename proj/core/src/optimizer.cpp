#include "viewdrift/attack/optimizer.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "viewdrift/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "optimizer state IO assumes a little-endian host");

namespace viewdrift::attack {

namespace {

constexpr char kStateMagic[8] = {'V', 'D', 'O', 'P', 'T', 'S', 'T', '1'};

void check(const OptimizerParams& op) {
  if (!(op.lr > 0.0)) throw InvalidInput("lr must be positive");
  if (op.beta1 < 0.0 || op.beta1 >= 1.0 || op.beta2 < 0.0 || op.beta2 >= 1.0)
    throw InvalidInput("betas must lie in [0,1)");
  if (!(op.eps > 0.0)) throw InvalidInput("eps must be positive");
  if (op.steps < 1) throw InvalidInput("steps must be >= 1");
  if (op.use_eot && op.eot_samples < 1) throw InvalidInput("eot_samples must be >= 1");
}

}  // namespace

OptimizerState OptimizerState::init(int h, int w) {
  OptimizerState st;
  st.texture = surrogate::Texture(h, w, 0.5);
  surrogate::project_unit(st.texture);
  st.m.assign(st.texture.data.size(), 0.0);
  st.v.assign(st.texture.data.size(), 0.0);
  return st;
}

surrogate::Texture base_texture(int h, int w) {
  surrogate::Texture tex(h, w, 0.0);
  surrogate::project_unit(tex);
  return tex;
}

TracePoint optimize_step(OptimizerState& st, const surrogate::Texture& base_tex,
                         const std::vector<TrainScenario>& scenarios,
                         const surrogate::SurrogateDetector& det, const EvalParams& eval,
                         const LossWeights& weights, const Palette& palette,
                         const OptimizerParams& op) {
  check(op);
  if (scenarios.empty()) throw InvalidInput("no training scenarios");
  if (base_tex.h != st.texture.h || base_tex.w != st.texture.w)
    throw InvalidInput("base texture dims mismatch");
  if (st.m.size() != st.texture.data.size() || st.v.size() != st.texture.data.size())
    throw InvalidInput("moment buffers do not match the texture");
  for (const TrainScenario& ts : scenarios)
    if (ts.atlas.tex_h != st.texture.h || ts.atlas.tex_w != st.texture.w)
      throw InvalidInput("atlas dims do not match the texture");

  std::vector<double> grad(st.texture.data.size(), 0.0);
  double sum_move = 0.0, sum_prog = 0.0, sum_fid = 0.0, sum_total = 0.0;
  const int n_draw = op.use_eot ? op.eot_samples : 1;
  int draws = 0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    for (int j = 0; j < n_draw; ++j) {
      surrogate::EotSample s;
      const surrogate::EotSample* sp = nullptr;
      if (op.use_eot) {
        Rng rng(split_seed(op.seed, static_cast<std::uint64_t>(st.step) * 64 + j, i));
        s = surrogate::sample_eot(op.ranges, rng);
        sp = &s;
      }
      const SequenceEval clean =
          evaluate_sequence(base_tex, scenarios[i].atlas, scenarios[i].window, det, eval, sp);
      const SceneLoss sl =
          scene_loss_grad(st.texture, scenarios[i].atlas, scenarios[i].window, det, eval, sp,
                          clean, scenarios[i].target, weights, grad);
      sum_move += sl.move;
      sum_prog += sl.prog;
      sum_fid += sl.fid;
      sum_total += sl.total;
      ++draws;
    }
  }
  const double inv = 1.0 / static_cast<double>(draws);
  for (double& g : grad) g *= inv;
  const TextureLoss tl = texture_loss_grad(st.texture, palette, weights, grad);

  st.step += 1;
  const double bc1 = 1.0 - std::pow(op.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(op.beta2, static_cast<double>(st.step));
  for (std::size_t p = 0; p < grad.size(); ++p) {
    st.m[p] = op.beta1 * st.m[p] + (1.0 - op.beta1) * grad[p];
    st.v[p] = op.beta2 * st.v[p] + (1.0 - op.beta2) * grad[p] * grad[p];
    st.texture.data[p] -= op.lr * (st.m[p] / bc1) / (std::sqrt(st.v[p] / bc2) + op.eps);
  }
  surrogate::project_unit(st.texture);

  TracePoint tp;
  tp.step = static_cast<int>(st.step);
  tp.move = sum_move * inv;
  tp.prog = sum_prog * inv;
  tp.fid = sum_fid * inv;
  tp.tv = tl.tv;
  tp.nps = tl.nps;
  tp.total = sum_total * inv + tl.total;
  return tp;
}

OptimizeResult optimize(const std::vector<TrainScenario>& scenarios,
                        const surrogate::SurrogateDetector& det, const EvalParams& eval,
                        const LossWeights& weights, const Palette& palette,
                        const OptimizerParams& op) {
  check(op);
  if (scenarios.empty()) throw InvalidInput("no training scenarios");
  const int h = scenarios.front().atlas.tex_h;
  const int w = scenarios.front().atlas.tex_w;
  OptimizerState st = OptimizerState::init(h, w);
  const surrogate::Texture base = base_texture(h, w);
  OptimizeResult out;
  for (int t = 0; t < op.steps; ++t) {
    const TracePoint tp = optimize_step(st, base, scenarios, det, eval, weights, palette, op);
    const bool keep = t == 0 || t == op.steps - 1 ||
                      (op.trace_every > 0 && (t + 1) % op.trace_every == 0);
    if (keep && (out.trace.empty() || out.trace.back().step != tp.step)) out.trace.push_back(tp);
    out.last = tp;
  }
  out.texture = st.texture;
  return out;
}

void write_state(const std::string& path, const OptimizerState& st) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out.write(kStateMagic, 8);
  const std::uint32_t h = static_cast<std::uint32_t>(st.texture.h);
  const std::uint32_t w = static_cast<std::uint32_t>(st.texture.w);
  const std::int64_t step = st.step;
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&step), 8);
  auto dump = [&](const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  dump(st.texture.data);
  dump(st.m);
  dump(st.v);
  if (!out) throw InvalidInput("short write to " + path);
}

OptimizerState read_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kStateMagic, 8) != 0)
    throw InvalidInput("not an optimizer state file: " + path);
  std::uint32_t h = 0, w = 0;
  std::int64_t step = 0;
  in.read(reinterpret_cast<char*>(&h), 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&step), 8);
  if (!in || h == 0 || w == 0 || step < 0) throw InvalidInput("bad state header: " + path);
  OptimizerState st = OptimizerState::init(static_cast<int>(h), static_cast<int>(w));
  st.step = step;
  auto slurp = [&](std::vector<double>& v) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  slurp(st.texture.data);
  slurp(st.m);
  slurp(st.v);
  if (!in) throw InvalidInput("truncated state file: " + path);
  return st;
}

}  // namespace viewdrift::attack
