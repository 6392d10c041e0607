/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "lume/losses.hpp"

#include <fmt/core.h>

#include <cmath>

#include "lume/errors.hpp"

namespace lume {

void LossWeights::validate() const {
  if (!(lambda_s >= 0))
    throw DomainError(fmt::format("weights: lambda_s must be >= 0, got {}", lambda_s));
  if (!(lambda_sp >= 0))
    throw DomainError(fmt::format("weights: lambda_sp must be >= 0, got {}", lambda_sp));
  if (!(th >= 0) || !(th <= 1))
    throw DomainError(fmt::format("weights: th must lie in [0,1], got {}", th));
}

Real photometric_loss(const ColorImage& observed, const ColorImage& rendered) {
  require_same_shape("photometric_loss", observed, rendered);
  Real sum = 0;
  for (int c = 0; c < 3; ++c)
    sum += (observed.ch[c] - rendered.ch[c]).square().sum();
  return sum / static_cast<Real>(observed.rows() * observed.cols() * 3);
}

Real smoothness_loss(const ScalarField& depth, const ColorImage& image) {
  require_same_shape("smoothness_loss", depth, image);
  const Eigen::Index h = depth.rows(), w = depth.cols();
  Real sum_x = 0, sum_y = 0;
  for (Eigen::Index v = 0; v < h; ++v)
    for (Eigen::Index u = 0; u + 1 < w; ++u) {
      Real di = 0;
      for (int c = 0; c < 3; ++c)
        di += std::abs(image.ch[c](v, u + 1) - image.ch[c](v, u));
      sum_x += std::abs(depth(v, u + 1) - depth(v, u)) * std::exp(-di / 3);
    }
  for (Eigen::Index v = 0; v + 1 < h; ++v)
    for (Eigen::Index u = 0; u < w; ++u) {
      Real di = 0;
      for (int c = 0; c < 3; ++c)
        di += std::abs(image.ch[c](v + 1, u) - image.ch[c](v, u));
      sum_y += std::abs(depth(v + 1, u) - depth(v, u)) * std::exp(-di / 3);
    }
  Real loss = 0;
  if (w > 1) loss += sum_x / static_cast<Real>(h * (w - 1));
  if (h > 1) loss += sum_y / static_cast<Real>((h - 1) * w);
  return loss;
}

Vec3 specular_direction(const Vec3& l, const Vec3& n) {
  if (std::abs(l.norm() - 1) > 1e-6)
    throw DomainError(fmt::format(
        "specular_direction: light direction must be unit, got norm {}", l.norm()));
  if (std::abs(n.norm() - 1) > 1e-6)
    throw DomainError(fmt::format(
        "specular_direction: normal must be unit, got norm {}", n.norm()));
  return 2 * n * n.dot(l) - l;
}

Real specular_loss(const ColorImage& image, const ScalarField& depth,
                   const NormalMap& normals, const VectorField& rays,
                   const LightModel& light, Real th) {
  require_same_shape("specular_loss: image vs depth", image, depth);
  require_same_shape("specular_loss: image vs normals", image, normals);
  require_same_shape("specular_loss: image vs rays", image, rays);
  Real sum = 0;
  Eigen::Index masked = 0;
  for (Eigen::Index v = 0; v < image.rows(); ++v)
    for (Eigen::Index u = 0; u < image.cols(); ++u) {
      const Vec3 rgb = image.at(v, u);
      if (rgb.maxCoeff() <= th) continue;
      const Vec3 ray = rays.at(v, u);
      const Vec3 x = depth(v, u) * ray;
      const Vec3 to_light = light.position - x;
      const Real dist = to_light.norm();
      if (dist <= 1e-12)
        throw DomainError(fmt::format(
            "specular_loss: surface point at pixel ({}, {}) coincides with the light",
            u, v));
      const Vec3 s = specular_direction(to_light / dist, normals.at(v, u));
      const Real resid = s.dot(-ray) - 1;
      sum += resid * resid;
      ++masked;
    }
  return masked == 0 ? 0 : sum / static_cast<Real>(masked);
}

LossBreakdown total_loss(const ColorImage& observed, const ScalarField& depth,
                         const AlbedoField& albedo, const LightModel& light,
                         const VectorField& rays, const LossWeights& weights) {
  weights.validate();
  const NormalMap normals = normals_six_neighbor(depth, rays);
  const ColorImage rendered = render_image(light, rays, depth, albedo, normals);
  LossBreakdown out;
  out.photometric = photometric_loss(observed, rendered);
  out.smoothness = smoothness_loss(depth, observed);
  out.specular = specular_loss(observed, depth, normals, rays, light, weights.th);
  out.total = out.photometric + weights.lambda_s * out.smoothness +
              weights.lambda_sp * out.specular;
  return out;
}

}  // namespace lume
