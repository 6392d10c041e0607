/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "lume/calib.hpp"

#include <fmt/core.h>

#include <cmath>
#include <limits>

#include "lume/errors.hpp"
#include "lume/optim.hpp"

namespace lume {

void CalibObservation::validate() const {
  require_same_shape("calibration observation: image vs depth", image, depth);
  require_same_shape("calibration observation: image vs normals", image, normals);
  require_same_shape("calibration observation: image vs albedo", image, albedo);
  for (Eigen::Index v = 0; v < depth.rows(); ++v)
    for (Eigen::Index u = 0; u < depth.cols(); ++u)
      if (!(depth(v, u) > 0))
        throw DomainError(fmt::format(
            "calibration observation: depth must be positive at pixel ({}, {})",
            u, v));
}

namespace {

struct Objective {
  Real value = 0;
  Vec3 d_position = Vec3::Zero();
  Real d_mu = 0;
};

// Mean squared post-gamma residual over all observations, with its analytic
// gradient in the light position and spread. E depends on the position only
// through x - x_l, so d/d(position) = -d/dx.
Objective evaluate(const std::vector<CalibObservation>& observations,
                   const VectorField& rays, const LightModel& light) {
  Objective obj;
  Eigen::Index count = 0;
  for (const CalibObservation& obs : observations) {
    for (Eigen::Index v = 0; v < obs.image.rows(); ++v)
      for (Eigen::Index u = 0; u < obs.image.cols(); ++u) {
        const Vec3 rho =
            hsv_to_rgb({obs.albedo.ch[0](v, u), obs.albedo.ch[1](v, u)});
        const ShadeParts parts =
            shade_pixel(light, rays.at(v, u), obs.depth(v, u), rho,
                        obs.normals.at(v, u));
        const Vec3 resid = parts.color - obs.image.at(v, u);
        obj.value += resid.squaredNorm();
        const Vec3 rad_bar =
            (2 * resid).cwiseProduct(gamma_slope(light, parts));
        const Real e_bar = light.gain * rad_bar.dot(rho);
        const IrradianceGrad grad = irradiance_gradient(light, parts);
        obj.d_position += e_bar * -grad.d_x;
        obj.d_mu += e_bar * grad.d_mu;
      }
    count += obs.image.rows() * obs.image.cols();
  }
  const Real norm = Real(1) / static_cast<Real>(count * 3);
  obj.value *= norm;
  obj.d_position *= norm;
  obj.d_mu *= norm;
  return obj;
}

Real rms_gray(const CalibObservation& obs, const VectorField& rays,
              const LightModel& light) {
  Real sum = 0;
  for (Eigen::Index v = 0; v < obs.image.rows(); ++v)
    for (Eigen::Index u = 0; u < obs.image.cols(); ++u) {
      const Vec3 rho =
          hsv_to_rgb({obs.albedo.ch[0](v, u), obs.albedo.ch[1](v, u)});
      const ShadingSample sample =
          render_pixel(light, rays.at(v, u), obs.depth(v, u), rho,
                       obs.normals.at(v, u));
      sum += (sample.color_rgb - obs.image.at(v, u)).squaredNorm();
    }
  return std::sqrt(sum / static_cast<Real>(obs.image.rows() *
                                           obs.image.cols() * 3)) *
         255;
}

}  // namespace

std::pair<LightModel, CalibReport> calibrate_light(
    const std::vector<CalibObservation>& observations, const CameraModel& cam,
    const LightModel& init, const CalibOptions& opts) {
  cam.validate();
  init.validate();
  if (observations.empty())
    throw DomainError("calibrate_light: need at least one observation");
  for (const CalibObservation& obs : observations) {
    obs.validate();
    if (obs.image.rows() != cam.height || obs.image.cols() != cam.width)
      throw ShapeError(fmt::format(
          "calibrate_light: observation is {} but the camera expects {}",
          shape_str(obs.image.rows(), obs.image.cols()),
          shape_str(cam.height, cam.width)));
  }
  if (opts.max_iterations < 1)
    throw DomainError("calibrate_light: max_iterations must be >= 1");

  const VectorField rays = build_ray_field(cam);
  CalibReport report;

  // The position and mu are only separable when the target depths vary
  // (two shots at different distances, or a tilted target).
  Real depth_min = std::numeric_limits<Real>::infinity(), depth_max = 0;
  for (const CalibObservation& obs : observations) {
    depth_min = std::min(depth_min, obs.depth.minCoeff());
    depth_max = std::max(depth_max, obs.depth.maxCoeff());
  }
  report.conditioning_warning = (depth_max - depth_min) < 1e-6 * depth_max;

  // Parameters live in a 1x4 grid (x, y, z, mu) driven by the shared Adam
  // machinery, with the step size staged downward so the fit can park at
  // sub-1e-3 accuracy.
  ScalarField theta(1, 4);
  theta(0, 0) = init.position.x();
  theta(0, 1) = init.position.y();
  theta(0, 2) = init.position.z();
  theta(0, 3) = init.mu;
  const auto to_light = [&](const ScalarField& t) {
    LightModel light = init;
    light.position = Vec3(t(0, 0), t(0, 1), t(0, 2));
    light.mu = std::max<Real>(0, t(0, 3));
    return light;
  };

  ScalarField best_theta = theta;
  Real best_value = evaluate(observations, rays, to_light(theta)).value;

  const Real schedule[] = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  const int blocks = static_cast<int>(std::size(schedule));
  const int per_block = std::max(1, opts.max_iterations / blocks);
  int iterations = 0;
  bool parked = false;
  for (int block = 0; block < blocks && !parked; ++block) {
    AdamParams params;
    params.step_size = schedule[block];
    AdamState state;
    state.init(1, 4);
    theta = best_theta;
    const Real block_start = best_value;
    for (int t = 1; t <= per_block && iterations < opts.max_iterations; ++t) {
      const Objective obj = evaluate(observations, rays, to_light(theta));
      ++iterations;
      if (obj.value < best_value) {
        best_value = obj.value;
        best_theta = theta;
        best_theta(0, 3) = std::max<Real>(0, best_theta(0, 3));
      }
      ScalarField grad(1, 4);
      grad(0, 0) = obj.d_position.x();
      grad(0, 1) = obj.d_position.y();
      grad(0, 2) = obj.d_position.z();
      grad(0, 3) = opts.fit_mu ? obj.d_mu : 0;
      if (grad.abs().maxCoeff() < 1e-14) {
        parked = true;
        break;
      }
      adam_step(theta, grad, state, t, params);
    }
    if (block == blocks - 1 &&
        block_start - best_value <= 1e-12 * std::max<Real>(1, block_start))
      parked = true;
  }

  const LightModel fitted = to_light(best_theta);
  report.objective = best_value;
  report.iterations = iterations;
  report.converged = parked;  // gradient vanished or the last block stalled
  for (const CalibObservation& obs : observations)
    report.rms_gray_levels.push_back(rms_gray(obs, rays, fitted));
  return {fitted, report};
}

}  // namespace lume
