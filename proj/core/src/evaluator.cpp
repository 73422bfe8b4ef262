#include "viewdrift/attack/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "viewdrift/scene/geometry.hpp"

namespace viewdrift::attack {

namespace {

constexpr double kFidFlat = 1e-12;  // below this the fidelity norm has no slope

void check(const EvalParams& p) {
  if (p.temporal_adapt < 0.0 || p.temporal_adapt > 1.0)
    throw InvalidInput("temporal_adapt outside [0,1]");
  if (!(p.reference_area > 0.0)) throw InvalidInput("reference_area must be positive");
  if (p.smear_coeff < 0.0) throw InvalidInput("smear_coeff must be >= 0");
}

void check_unit(const std::array<double, 2>& u) {
  if (std::abs(std::hypot(u[0], u[1]) - 1.0) > 1e-6) throw InvalidInput("u must be unit length");
}

}  // namespace

std::vector<scene::DetectionBox> SequenceEval::detections() const {
  std::vector<scene::DetectionBox> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.detection);
  return out;
}

std::vector<std::array<double, 2>> SequenceEval::centers() const {
  std::vector<std::array<double, 2>> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back({f.detection.box.x, f.detection.box.y});
  return out;
}

surrogate::ViewContext frame_context(const scene::FrameState& frame,
                                     const scene::VehicleSpec& spec,
                                     const scene::CameraModel& camera, const EvalParams& params) {
  check(params);
  surrogate::ViewContext ctx;
  ctx.view = scene::viewing_angle(frame.ego, frame.target);
  ctx.visibility = scene::face_visibility(frame.ego, frame.target, spec);
  ctx.illumination = frame.illumination;
  double area = 0.0;
  try {
    area = scene::projected_area(camera, frame.ego, scene::clean_detection(frame, spec).box);
  } catch (const NotVisible&) {
    area = 0.0;
  }
  ctx.area_factor = std::clamp(area / params.reference_area, 0.0, 1.0);
  ctx.sharpness = scene::motion_sharpness(frame, params.smear_coeff);
  return ctx;
}

namespace {

// Shared forward skeleton; detections are produced by the caller so the
// gradient path can capture Jacobians.
struct ForwardPass {
  scene::VehicleSpec spec;
  std::vector<scene::FrameState> frames;
};

ForwardPass transformed(const scene::ScenarioSequence& seq, const surrogate::EotSample* eot) {
  if (seq.frames.empty()) throw InvalidInput("sequence has no frames");
  ForwardPass fp{seq.target_spec, seq.frames};
  if (eot) {
    fp.spec = surrogate::apply_eot(fp.spec, *eot);
    for (auto& f : fp.frames) f = surrogate::apply_eot(f, *eot);
  }
  return fp;
}

void pool_all(const surrogate::Texture& tex, const surrogate::FaceAtlas& atlas,
              const ForwardPass& fp, const scene::CameraModel& camera, const EvalParams& params,
              std::vector<FrameEval>& fe, surrogate::FeatureVector& acc) {
  acc.fill(0.0);
  fe.resize(fp.frames.size());
  for (std::size_t k = 0; k < fp.frames.size(); ++k) {
    fe[k].ctx = frame_context(fp.frames[k], fp.spec, camera, params);
    fe[k].raw = surrogate::pool_features(tex, atlas, fe[k].ctx);
    fe[k].prior = scene::clean_detection(fp.frames[k], fp.spec);
    for (int i = 0; i < 24; ++i) acc[i] += fe[k].raw[i];
  }
  const double eta_over_k = params.temporal_adapt / static_cast<double>(fp.frames.size());
  for (auto& f : fe)
    for (int i = 0; i < 24; ++i) f.adapted[i] = f.raw[i] - eta_over_k * acc[i];
}

}  // namespace

SequenceEval evaluate_sequence(const surrogate::Texture& tex, const surrogate::FaceAtlas& atlas,
                               const scene::ScenarioSequence& seq,
                               const surrogate::SurrogateDetector& det, const EvalParams& params,
                               const surrogate::EotSample* eot) {
  check(params);
  const ForwardPass fp = transformed(seq, eot);
  SequenceEval ev;
  surrogate::FeatureVector acc{};
  pool_all(tex, atlas, fp, seq.camera, params, ev.frames, acc);
  for (auto& f : ev.frames) f.detection = surrogate::detect(f.prior, f.adapted, det);
  return ev;
}

std::vector<double> displacement_series(const SequenceEval& clean, const SequenceEval& attacked,
                                        const std::array<double, 2>& u) {
  if (clean.frames.size() != attacked.frames.size())
    throw InvalidInput("clean/attacked frame count mismatch");
  check_unit(u);
  std::vector<double> d(clean.frames.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    const auto& c = clean.frames[k].detection.box;
    const auto& a = attacked.frames[k].detection.box;
    d[k] = displacement({c.x, c.y}, {a.x, a.y}, u);
  }
  return d;
}

namespace {

SceneLoss assemble_scene_loss(const std::vector<double>& disp, const std::vector<double>& fidv,
                              const AttackTarget& target, const LossWeights& weights) {
  SceneLoss out;
  out.displacements = disp;
  out.move = loss_move(disp);
  out.prog = disp.size() >= 2 ? loss_prog(disp, target.s) : 0.0;
  double fsum = 0.0;
  for (double f : fidv) fsum += f;
  out.fid = fsum / static_cast<double>(fidv.size());
  out.total = weights.move * out.move + weights.prog * out.prog + weights.fid * out.fid;
  return out;
}

}  // namespace

SceneLoss scene_loss(const SequenceEval& clean, const SequenceEval& attacked,
                     const AttackTarget& target, const LossWeights& weights) {
  const std::vector<double> disp = displacement_series(clean, attacked, target.u);
  std::vector<double> fidv(disp.size());
  for (std::size_t k = 0; k < disp.size(); ++k)
    fidv[k] =
        loss_fid(fidelity(attacked.frames[k].detection), fidelity(clean.frames[k].detection));
  return assemble_scene_loss(disp, fidv, target, weights);
}

SceneLoss scene_loss_grad(const surrogate::Texture& tex, const surrogate::FaceAtlas& atlas,
                          const scene::ScenarioSequence& seq,
                          const surrogate::SurrogateDetector& det, const EvalParams& params,
                          const surrogate::EotSample* eot, const SequenceEval& clean,
                          const AttackTarget& target, const LossWeights& weights,
                          std::vector<double>& grad) {
  check(params);
  check_unit(target.u);
  if (clean.frames.size() != seq.frames.size())
    throw InvalidInput("clean eval does not match the sequence");
  if (grad.empty()) grad.assign(tex.data.size(), 0.0);
  if (grad.size() != tex.data.size()) throw InvalidInput("gradient buffer size mismatch");

  const ForwardPass fp = transformed(seq, eot);
  const std::size_t n = fp.frames.size();
  std::vector<FrameEval> fe;
  surrogate::FeatureVector acc{};
  pool_all(tex, atlas, fp, seq.camera, params, fe, acc);

  std::vector<surrogate::DetectGradient> dg(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto [d, g] = surrogate::detect_with_gradient(fe[k].prior, fe[k].adapted, det);
    fe[k].detection = d;
    dg[k] = g;
  }

  std::vector<double> disp(n), fidv(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& c = clean.frames[k].detection;
    const auto& a = fe[k].detection;
    disp[k] = displacement({c.box.x, c.box.y}, {a.box.x, a.box.y}, target.u);
    fidv[k] = loss_fid(fidelity(a), fidelity(c));
  }
  const SceneLoss out = assemble_scene_loss(disp, fidv, target, weights);

  // d(total)/d(d_k): move contributes -w_move, prog couples neighbours.
  std::vector<double> cot_d(n, -weights.move);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double r = 2.0 * weights.prog * (disp[k + 1] - disp[k] - target.s);
    cot_d[k + 1] += r;
    cot_d[k] -= r;
  }

  std::vector<Eigen::Matrix<double, 24, 1>> cot_feat(n);
  Eigen::Matrix<double, 24, 1> cot_sum = Eigen::Matrix<double, 24, 1>::Zero();
  const double fid_frame = weights.fid / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::Matrix<double, surrogate::kOutputs, 1> cot_out =
        Eigen::Matrix<double, surrogate::kOutputs, 1>::Zero();
    cot_out(0) = cot_d[k] * target.u[0];
    cot_out(1) = cot_d[k] * target.u[1];
    if (fidv[k] > kFidFlat) {
      const double cf = fid_frame / fidv[k];
      const auto& a = fe[k].detection;
      const auto& c = clean.frames[k].detection;
      cot_out(2) += cf * scene::wrap_angle(a.box.yaw - c.box.yaw) / (kFidYawScale * kFidYawScale);
      cot_out(3) += cf * (a.box.l - c.box.l) / (kFidDimScale * kFidDimScale);
      cot_out(4) += cf * (a.box.w - c.box.w) / (kFidDimScale * kFidDimScale);
      cot_out(5) += cf * (a.box.h - c.box.h) / (kFidDimScale * kFidDimScale);
      cot_out(6) += cf * (a.confidence - c.confidence) / (kFidConfScale * kFidConfScale);
    }
    cot_feat[k] = dg[k].d_out_d_feat.transpose() * cot_out;
    cot_sum += cot_feat[k];
  }

  // Adjoint of the high-pass: raw_j feeds every adapted_k through the mean.
  const double eta_over_k = params.temporal_adapt / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Matrix<double, 24, 1> cot_raw = cot_feat[k] - eta_over_k * cot_sum;
    surrogate::FeatureVector dfeat;
    for (int i = 0; i < 24; ++i) dfeat[i] = cot_raw(i);
    surrogate::pool_backward(tex, atlas, fe[k].ctx, dfeat, grad);
  }
  return out;
}

TextureLoss texture_loss(const surrogate::Texture& tex, const Palette& palette,
                         const LossWeights& weights) {
  TextureLoss out;
  out.tv = loss_tv(tex);
  out.nps = loss_nps(tex, palette);
  out.total = weights.tv * out.tv + weights.nps * out.nps;
  return out;
}

TextureLoss texture_loss_grad(const surrogate::Texture& tex, const Palette& palette,
                              const LossWeights& weights, std::vector<double>& grad) {
  if (grad.empty()) grad.assign(tex.data.size(), 0.0);
  const TextureLoss out = texture_loss(tex, palette, weights);
  loss_tv_backward(tex, weights.tv, grad);
  loss_nps_backward(tex, palette, weights.nps, grad);
  return out;
}

}  // namespace viewdrift::attack
