/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "lume/photometry.hpp"

#include <fmt/core.h>

#include <cmath>

#include "lume/errors.hpp"
#include "lume/parallel.hpp"

namespace lume {

namespace {
constexpr Real kDegenerateDist = 1e-12;
}

void LightModel::validate() const {
  if (std::abs(axis.norm() - 1) > 1e-12)
    throw DomainError(
        fmt::format("light: axis must be unit length, got norm {}", axis.norm()));
  if (!(mu >= 0)) throw DomainError(fmt::format("light: mu must be >= 0, got {}", mu));
  if (!(sigma0 > 0))
    throw DomainError(fmt::format("light: sigma0 must be > 0, got {}", sigma0));
  if (!(gain > 0)) throw DomainError(fmt::format("light: gain must be > 0, got {}", gain));
  if (!(gamma >= 1))
    throw DomainError(fmt::format("light: gamma must be >= 1, got {}", gamma));
}

void AlbedoHS::validate() const {
  if (!(h >= 0) || !(h < 1))
    throw DomainError(fmt::format("albedo: hue must lie in [0,1), got {}", h));
  if (!(s >= 0) || !(s <= 1))
    throw DomainError(fmt::format("albedo: saturation must lie in [0,1], got {}", s));
}

Real radial_attenuation(const LightModel& light, Real psi) {
  if (!(psi >= 0) || !(psi <= M_PI))
    throw DomainError(fmt::format("radial_attenuation: psi must lie in [0,pi], got {}", psi));
  return std::exp(-light.mu * (1 - std::cos(psi)));
}

Real off_axis_angle(const LightModel& light, const Vec3& x) {
  const Vec3 w = x - light.position;
  const Real dist = w.norm();
  if (dist <= kDegenerateDist)
    throw DomainError("off_axis_angle: surface point coincides with the light position");
  const Real c = std::clamp<Real>(light.axis.dot(w) / dist, -1, 1);
  return std::acos(c);
}

Real irradiance_geometry(const LightModel& light, const Vec3& x, const Vec3& n) {
  if (std::abs(n.norm() - 1) > 1e-9)
    throw DomainError(
        fmt::format("irradiance_geometry: normal must be unit length, got norm {}", n.norm()));
  const Vec3 w = x - light.position;
  const Real dist = w.norm();
  if (dist <= kDegenerateDist)
    throw DomainError("irradiance_geometry: surface point coincides with the light position");
  const Vec3 w_hat = w / dist;
  const Real cos_psi = std::clamp<Real>(light.axis.dot(w_hat), -1, 1);
  const Real atten = std::exp(-light.mu * (1 - cos_psi));
  const Real cos_theta = (-w_hat).dot(n);
  return light.sigma0 / (dist * dist) * atten * std::max<Real>(0, cos_theta);
}

Vec3 hsv_to_rgb(const AlbedoHS& albedo) {
  albedo.validate();
  const Real h6 = albedo.h * 6;
  const int sector = std::min(5, static_cast<int>(h6));
  const Real f = h6 - sector;
  const Real s = albedo.s;
  const Real v = 1;
  const Real p = 1 - s;
  const Real q = 1 - f * s;
  const Real t = 1 - (1 - f) * s;
  switch (sector) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

Eigen::Matrix<Real, 3, 2> hsv_to_rgb_jacobian(const AlbedoHS& albedo) {
  const Real h6 = albedo.h * 6;
  const int sector = std::min(5, static_cast<int>(h6));
  const Real f = h6 - sector;
  const Real s = albedo.s;
  // p = 1 - s, q = 1 - f s, t = 1 - (1 - f) s; df/dh = 6 within a sector.
  const Vec3 d_f_rgb = [&]() -> Vec3 {  // d(rgb)/df
    switch (sector) {
      case 0: return {0, s, 0};
      case 1: return {-s, 0, 0};
      case 2: return {0, 0, s};
      case 3: return {0, -s, 0};
      case 4: return {s, 0, 0};
      default: return {0, 0, -s};
    }
  }();
  const Vec3 d_s_rgb = [&]() -> Vec3 {
    const Real dp = -1, dq = -f, dt = -(1 - f);
    switch (sector) {
      case 0: return {0, dt, dp};
      case 1: return {dq, 0, dp};
      case 2: return {dp, 0, dt};
      case 3: return {dp, dq, 0};
      case 4: return {dt, dp, 0};
      default: return {0, dp, dq};
    }
  }();
  Eigen::Matrix<Real, 3, 2> jac;
  jac.col(0) = d_f_rgb * 6;
  jac.col(1) = d_s_rgb;
  return jac;
}

ShadeParts shade_pixel(const LightModel& light, const Vec3& ray, Real d,
                       const Vec3& albedo_rgb, const Vec3& n) {
  if (!(d > 0))
    throw DomainError(fmt::format("shade_pixel: depth must be positive, got {}", d));
  ShadeParts parts;
  parts.x = d * ray;
  parts.n = n;
  const Vec3 w = parts.x - light.position;
  parts.dist = w.norm();
  if (parts.dist <= kDegenerateDist)
    throw DomainError("shade_pixel: surface point coincides with the light position");
  parts.w_hat = w / parts.dist;
  parts.cos_psi = std::clamp<Real>(light.axis.dot(parts.w_hat), -1, 1);
  parts.atten = std::exp(-light.mu * (1 - parts.cos_psi));
  parts.q = light.sigma0 * parts.atten / (parts.dist * parts.dist);
  parts.cos_theta = (-parts.w_hat).dot(n);
  parts.irradiance = parts.q * std::max<Real>(0, parts.cos_theta);
  const Real inv_gamma = 1 / light.gamma;
  for (int c = 0; c < 3; ++c) {
    parts.radiance[c] = parts.irradiance * albedo_rgb[c] * light.gain;
    parts.color[c] = std::min<Real>(1, std::pow(parts.radiance[c], inv_gamma));
  }
  return parts;
}

ShadingSample render_pixel(const LightModel& light, const Vec3& ray, Real d,
                           const Vec3& albedo_rgb, const Vec3& n) {
  const ShadeParts parts = shade_pixel(light, ray, d, albedo_rgb, n);
  return {parts.radiance, parts.color};
}

IrradianceGrad irradiance_gradient(const LightModel& light,
                                   const ShadeParts& parts) {
  IrradianceGrad grad;
  const Real clamped_cos = std::max<Real>(0, parts.cos_theta);
  // q = sigma0 R / dist^2 gives dq/dx = q (mu (axis - cos_psi w_hat)
  // - 2 w_hat) / dist, with d(w_hat)/dx = (I - w_hat w_hat^T)/dist.
  const Vec3 dq_dx = parts.q *
                     (light.mu * (light.axis - parts.cos_psi * parts.w_hat) -
                      2 * parts.w_hat) /
                     parts.dist;
  grad.d_x = clamped_cos * dq_dx;
  if (parts.cos_theta > 0) {
    // cos_theta = -w_hat . n, so d(cos_theta)/dx = -(n + cos_theta w_hat)/dist
    // and d(cos_theta)/dn = -w_hat. The clamp contributes zero elsewhere.
    grad.d_x += parts.q * -(parts.n + parts.cos_theta * parts.w_hat) / parts.dist;
    grad.d_n = -parts.q * parts.w_hat;
  }
  grad.d_mu = -(1 - parts.cos_psi) * parts.irradiance;
  return grad;
}

Vec3 gamma_slope(const LightModel& light, const ShadeParts& parts) {
  const Real inv_gamma = 1 / light.gamma;
  Vec3 slope = Vec3::Zero();
  for (int c = 0; c < 3; ++c) {
    const Real r = parts.radiance[c];
    if (r > 0 && r < 1) slope[c] = inv_gamma * std::pow(r, inv_gamma - 1);
  }
  return slope;
}

ColorImage render_image(const LightModel& light, const VectorField& rays,
                        const ScalarField& depth, const AlbedoField& albedo,
                        const VectorField& normals) {
  light.validate();
  require_same_shape("render_image: rays vs depth", rays, depth);
  require_same_shape("render_image: rays vs albedo", rays, albedo);
  require_same_shape("render_image: rays vs normals", rays, normals);
  ColorImage image(depth.rows(), depth.cols());
  parallel_rows(depth.rows(), [&](Eigen::Index v0, Eigen::Index v1) {
    for (Eigen::Index v = v0; v < v1; ++v)
      for (Eigen::Index u = 0; u < depth.cols(); ++u) {
        const Vec3 rgb = hsv_to_rgb({albedo.ch[0](v, u), albedo.ch[1](v, u)});
        const ShadingSample sample =
            render_pixel(light, rays.at(v, u), depth(v, u), rgb, normals.at(v, u));
        image.set(v, u, sample.color_rgb);
      }
  });
  return image;
}

}  // namespace lume
