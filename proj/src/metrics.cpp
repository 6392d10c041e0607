/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "lume/metrics.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lume/errors.hpp"

namespace lume {

namespace {

void check_positive(const char* context, const ScalarField& field) {
  for (Eigen::Index v = 0; v < field.rows(); ++v)
    for (Eigen::Index u = 0; u < field.cols(); ++u)
      if (!(field(v, u) > 0))
        throw DomainError(fmt::format("{}: value must be positive at pixel ({}, {}), got {}",
                                      context, u, v, field(v, u)));
}

void check_unit_range(const char* context, const ColorImage& image) {
  for (int c = 0; c < 3; ++c)
    for (Eigen::Index v = 0; v < image.rows(); ++v)
      for (Eigen::Index u = 0; u < image.cols(); ++u) {
        const Real x = image.ch[c](v, u);
        if (!(x >= 0) || !(x <= 1))
          throw DomainError(fmt::format(
              "{}: channel {} at pixel ({}, {}) is {} but must lie in [0,1]",
              context, c, u, v, x));
      }
}

constexpr int kSsimTaps = 11;

// 11-tap Gaussian, sigma 1.5, normalized to unit sum.
std::array<Real, kSsimTaps> ssim_window() {
  std::array<Real, kSsimTaps> window;
  Real sum = 0;
  for (int i = 0; i < kSsimTaps; ++i) {
    const Real d = i - (kSsimTaps - 1) / 2;
    window[i] = std::exp(-d * d / (2 * 1.5 * 1.5));
    sum += window[i];
  }
  for (Real& x : window) x /= sum;
  return window;
}

// Valid-region separable filter: output is (h-10) x (w-10).
ScalarField filter_valid(const ScalarField& in,
                         const std::array<Real, kSsimTaps>& window) {
  const Eigen::Index h = in.rows(), w = in.cols();
  ScalarField rows(h, w - kSsimTaps + 1);
  for (Eigen::Index v = 0; v < h; ++v)
    for (Eigen::Index u = 0; u + kSsimTaps <= w; ++u) {
      Real acc = 0;
      for (int k = 0; k < kSsimTaps; ++k) acc += window[k] * in(v, u + k);
      rows(v, u) = acc;
    }
  ScalarField out(h - kSsimTaps + 1, w - kSsimTaps + 1);
  for (Eigen::Index v = 0; v + kSsimTaps <= h; ++v)
    for (Eigen::Index u = 0; u < out.cols(); ++u) {
      Real acc = 0;
      for (int k = 0; k < kSsimTaps; ++k) acc += window[k] * rows(v + k, u);
      out(v, u) = acc;
    }
  return out;
}

}  // namespace

Real median(const ScalarField& field) {
  if (field.size() == 0) throw DomainError("median: empty field");
  std::vector<Real> values(field.data(), field.data() + field.size());
  const std::size_t mid = (values.size() - 1) / 2;  // lower middle
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  return values[mid];
}

std::pair<ScalarField, Real> median_align(const ScalarField& pred,
                                          const ScalarField& gt) {
  require_same_shape("median_align", pred, gt);
  check_positive("median_align: pred", pred);
  check_positive("median_align: gt", gt);
  const Real scale = median(gt) / median(pred);
  return {pred * scale, scale};
}

DepthMetrics depth_metrics(const ScalarField& pred, const ScalarField& gt,
                           bool align) {
  require_same_shape("depth_metrics", pred, gt);
  check_positive("depth_metrics: pred", pred);
  check_positive("depth_metrics: gt", gt);
  const ScalarField p = align ? median_align(pred, gt).first : pred;
  const Real n = static_cast<Real>(gt.size());

  DepthMetrics out;
  const ScalarField err = p - gt;
  const ScalarField abs_err = err.abs();
  out.mae = abs_err.sum() / n;
  out.medae = median(abs_err);
  out.rmse = std::sqrt(err.square().sum() / n);
  out.rmse_log = std::sqrt((p.log() - gt.log()).square().sum() / n);
  out.abs_rel = (abs_err / gt).sum() / n;
  out.sq_rel = (err.square() / gt).sum() / n;
  const ScalarField ratio = (p / gt).max(gt / p);
  out.delta1 = (ratio < Real(1.25)).count() / n;
  out.delta2 = (ratio < Real(1.25 * 1.25)).count() / n;
  out.delta3 = (ratio < Real(1.25 * 1.25 * 1.25)).count() / n;
  return out;
}

Real normal_mae(const NormalMap& pred, const NormalMap& gt) {
  require_same_shape("normal_mae", pred, gt);
  Real sum = 0;
  for (Eigen::Index v = 0; v < pred.rows(); ++v)
    for (Eigen::Index u = 0; u < pred.cols(); ++u) {
      const Vec3 a = pred.at(v, u);
      const Vec3 b = gt.at(v, u);
      if (std::abs(a.norm() - 1) > 1e-6 || std::abs(b.norm() - 1) > 1e-6)
        throw DomainError(fmt::format(
            "normal_mae: non-unit normal at pixel ({}, {})", u, v));
      sum += std::acos(std::clamp<Real>(a.dot(b), -1, 1));
    }
  return sum / static_cast<Real>(pred.rows() * pred.cols()) * 180 / M_PI;
}

Real ssim(const ColorImage& a, const ColorImage& b) {
  require_same_shape("ssim", a, b);
  check_unit_range("ssim: first image", a);
  check_unit_range("ssim: second image", b);
  if (a.rows() < kSsimTaps || a.cols() < kSsimTaps)
    throw ShapeError(fmt::format("ssim: image must be at least {0}x{0}, got {1}",
                                 kSsimTaps, shape_str(a.rows(), a.cols())));
  const auto window = ssim_window();
  constexpr Real kC1 = 0.01 * 0.01;
  constexpr Real kC2 = 0.03 * 0.03;
  Real total = 0;
  for (int c = 0; c < 3; ++c) {
    const ScalarField mu_a = filter_valid(a.ch[c], window);
    const ScalarField mu_b = filter_valid(b.ch[c], window);
    const ScalarField raw_aa = filter_valid(a.ch[c] * a.ch[c], window);
    const ScalarField raw_bb = filter_valid(b.ch[c] * b.ch[c], window);
    const ScalarField raw_ab = filter_valid(a.ch[c] * b.ch[c], window);
    const ScalarField var_a = raw_aa - mu_a.square();
    const ScalarField var_b = raw_bb - mu_b.square();
    const ScalarField cov = raw_ab - mu_a * mu_b;
    const ScalarField score =
        ((2 * mu_a * mu_b + kC1) * (2 * cov + kC2)) /
        ((mu_a.square() + mu_b.square() + kC1) * (var_a + var_b + kC2));
    total += score.mean();
  }
  return total / 3;
}

Real image_mae(const ColorImage& a, const ColorImage& b) {
  require_same_shape("image_mae", a, b);
  Real sum = 0;
  for (int c = 0; c < 3; ++c) sum += (a.ch[c] - b.ch[c]).abs().sum();
  return sum / static_cast<Real>(a.rows() * a.cols() * 3);
}

MetricsReport evaluate(const ScalarField& pred_depth,
                       const ScalarField& gt_depth,
                       const NormalMap& pred_normals,
                       const NormalMap& gt_normals,
                       const ColorImage& pred_image,
                       const ColorImage& gt_image) {
  MetricsReport report;
  report.scale = median_align(pred_depth, gt_depth).second;
  report.depth = depth_metrics(pred_depth, gt_depth, true);
  report.normal_mae_deg = normal_mae(pred_normals, gt_normals);
  report.ssim = ssim(pred_image, gt_image);
  report.image_mae = image_mae(pred_image, gt_image);
  return report;
}

}  // namespace lume
