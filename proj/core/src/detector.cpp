#include "viewdrift/surrogate/detector.hpp"

#include <cmath>

#include "viewdrift/rng.hpp"

namespace viewdrift::surrogate {

namespace {

// tanh(r)/r, smooth through r = 0.
double tanhc(double r) {
  if (r < 1e-8) return 1.0 - r * r / 3.0;
  return std::tanh(r) / r;
}

struct Forward {
  Eigen::Matrix<double, kHidden, 1> hidden;  // tanh(w1 * feats)
  Eigen::Matrix<double, kOutputs, 1> raw;    // w2 * hidden
  double dx, dy, dyaw, dl, dw, dh, dconf;
  double gate;  // sigmoid score gate in the attacked confidence
};

Forward run(const scene::DetectionBox& clean, const FeatureVector& feats,
            const SurrogateDetector& det) {
  if (!(clean.box.l > 0.0 && clean.box.w > 0.0 && clean.box.h > 0.0))
    throw InvalidInput("clean box dims must be positive");
  if (clean.confidence < 0.0 || clean.confidence > 1.0)
    throw InvalidInput("confidence outside [0,1]");
  Forward fw;
  Eigen::Map<const Eigen::Matrix<double, 24, 1>> phi(feats.data());
  fw.hidden = (det.w1 * phi).array().tanh();
  fw.raw = det.w2 * fw.hidden;
  const double gx = fw.raw(0), gy = fw.raw(1);
  const double r = std::hypot(gx, gy);
  const double k = det.params.kappa * tanhc(r);
  fw.dx = k * gx;
  fw.dy = k * gy;
  fw.dyaw = det.params.yaw_scale * std::tanh(fw.raw(2));
  fw.dl = det.params.dim_scale * std::tanh(fw.raw(3));
  fw.dw = det.params.dim_scale * std::tanh(fw.raw(4));
  fw.dh = det.params.dim_scale * std::tanh(fw.raw(5));
  const double t6 = std::tanh(fw.raw(6));
  fw.dconf = -clean.confidence * t6 * t6;
  const double z = (clean.confidence + fw.dconf - det.params.accept_mid) / det.params.accept_width;
  fw.gate = 1.0 / (1.0 + std::exp(-z));
  return fw;
}

scene::DetectionBox assemble(const scene::DetectionBox& clean, const Forward& fw) {
  scene::DetectionBox out = clean;
  const double g = fw.gate;
  out.box.x += g * fw.dx;
  out.box.y += g * fw.dy;
  out.box.z += 0.5 * g * fw.dh;  // stays grounded as the height changes
  out.box.l += g * fw.dl;
  out.box.w += g * fw.dw;
  out.box.h += g * fw.dh;
  out.box.yaw = scene::wrap_angle(out.box.yaw + g * fw.dyaw);
  out.confidence = clean.confidence + fw.dconf;
  return out;
}

}  // namespace

SurrogateDetector::SurrogateDetector(const DetectorParams& p) : params(p) {
  if (!(p.kappa > 0.0) || !(p.yaw_scale > 0.0) || !(p.dim_scale > 0.0) || !(p.gain > 0.0))
    throw InvalidInput("detector scales must be positive");
  if (!(p.mix_scale > 0.0)) throw InvalidInput("mix_scale must be positive");
  if (!(p.accept_width > 0.0)) throw InvalidInput("accept_width must be positive");
  Rng rng(p.seed);
  // Row-major fill order pins the weight stream to the seed.
  for (int i = 0; i < kHidden; ++i)
    for (int j = 0; j < 24; ++j) w1(i, j) = rng.normal(0.0, p.mix_scale / std::sqrt(24.0));
  for (int i = 0; i < kOutputs; ++i)
    for (int j = 0; j < kHidden; ++j)
      w2(i, j) = rng.normal(0.0, p.gain / std::sqrt(static_cast<double>(kHidden)));
  // Random planar rows are correlated with each other and with the score row,
  // which would make some push directions cheaper than others and tie any
  // center push to a score drop. Orthogonalize the planar pair against the
  // score row and each other (norms preserved on average), mirroring heads
  // with separate localization and objectness branches.
  Eigen::RowVectorXd r0 = w2.row(0), r1 = w2.row(1), rs = w2.row(6).normalized();
  const double keep = 0.5 * (r0.norm() + r1.norm());
  r0 -= r0.dot(rs) * rs;
  r1 -= r1.dot(rs) * rs;
  r1 -= (r1.dot(r0) / r0.squaredNorm()) * r0;
  w2.row(0) = r0 * (keep / r0.norm());
  w2.row(1) = r1 * (keep / r1.norm());
}

scene::DetectionBox detect(const scene::DetectionBox& clean, const FeatureVector& feats,
                           const SurrogateDetector& det) {
  return assemble(clean, run(clean, feats, det));
}

std::pair<scene::DetectionBox, DetectGradient> detect_with_gradient(
    const scene::DetectionBox& clean, const FeatureVector& feats, const SurrogateDetector& det) {
  const Forward fw = run(clean, feats, det);

  // d(raw)/d(feats): w2 * diag(1 - hidden^2) * w1.
  Eigen::Matrix<double, kHidden, 24> dhid =
      (1.0 - fw.hidden.array().square()).matrix().asDiagonal() * det.w1;
  Eigen::Matrix<double, kOutputs, 24> draw = det.w2 * dhid;

  DetectGradient dg;
  const double gx = fw.raw(0), gy = fw.raw(1);
  const double r = std::hypot(gx, gy);
  const double kappa = det.params.kappa;
  // Planar block: d/dg of kappa * tanhc(|g|) * g.
  double a, da_over_r;
  if (r < 1e-8) {
    a = 1.0 - r * r / 3.0;
    da_over_r = -2.0 / 3.0;
  } else {
    a = std::tanh(r) / r;
    const double sech2 = 1.0 - std::tanh(r) * std::tanh(r);
    da_over_r = (sech2 * r - std::tanh(r)) / (r * r * r);
  }
  Eigen::Matrix2d planar;
  planar(0, 0) = kappa * (a + da_over_r * gx * gx);
  planar(0, 1) = kappa * da_over_r * gx * gy;
  planar(1, 0) = planar(0, 1);
  planar(1, 1) = kappa * (a + da_over_r * gy * gy);

  auto sech2 = [](double x) {
    const double t = std::tanh(x);
    return 1.0 - t * t;
  };
  Eigen::Matrix<double, 6, 24> pre;  // pre-gate deviation Jacobians
  pre.row(0) = planar(0, 0) * draw.row(0) + planar(0, 1) * draw.row(1);
  pre.row(1) = planar(1, 0) * draw.row(0) + planar(1, 1) * draw.row(1);
  pre.row(2) = det.params.yaw_scale * sech2(fw.raw(2)) * draw.row(2);
  pre.row(3) = det.params.dim_scale * sech2(fw.raw(3)) * draw.row(3);
  pre.row(4) = det.params.dim_scale * sech2(fw.raw(4)) * draw.row(4);
  pre.row(5) = det.params.dim_scale * sech2(fw.raw(5)) * draw.row(5);
  const double t6 = std::tanh(fw.raw(6));
  dg.d_out_d_feat.row(6) = -clean.confidence * 2.0 * t6 * sech2(fw.raw(6)) * draw.row(6);

  // out_i = clean_i + gate(conf) * v_i, so each geometric row carries a
  // chain term through the gate.
  const double dgate = fw.gate * (1.0 - fw.gate) / det.params.accept_width;
  const double dev[6] = {fw.dx, fw.dy, fw.dyaw, fw.dl, fw.dw, fw.dh};
  for (int i = 0; i < 6; ++i)
    dg.d_out_d_feat.row(i) = fw.gate * pre.row(i) + dev[i] * dgate * dg.d_out_d_feat.row(6);

  return {assemble(clean, fw), dg};
}

std::vector<double> output_pixel_gradient(const DetectGradient& dg, int output_index,
                                          const Texture& tex, const FaceAtlas& atlas,
                                          const ViewContext& ctx) {
  if (output_index < 0 || output_index >= kOutputs) throw InvalidInput("bad output index");
  FeatureVector dfeat{};
  for (int j = 0; j < 24; ++j) dfeat[j] = dg.d_out_d_feat(output_index, j);
  std::vector<double> grad(tex.data.size(), 0.0);
  pool_backward(tex, atlas, ctx, dfeat, grad);
  return grad;
}

}  // namespace viewdrift::surrogate
