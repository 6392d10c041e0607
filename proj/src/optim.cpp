/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "lume/optim.hpp"

#include <fmt/core.h>

#include <cmath>
#include <vector>

#include "lume/errors.hpp"
#include "lume/normals.hpp"
#include "lume/parallel.hpp"

namespace lume {

void adam_step(ScalarField& theta, const ScalarField& grad, AdamState& state,
               int t, const AdamParams& params) {
  require_same_shape("adam_step: theta vs grad", theta, grad);
  state.m = params.beta1 * state.m + (1 - params.beta1) * grad;
  state.v = params.beta2 * state.v + (1 - params.beta2) * grad.square();
  const Real bias1 = 1 - std::pow(params.beta1, t);
  const Real bias2 = 1 - std::pow(params.beta2, t);
  theta -= params.step_size * (state.m / bias1) /
           ((state.v / bias2).sqrt() + params.epsilon);
}

void RecoveryConfig::validate() const {
  if (steps < 1) throw DomainError(fmt::format("config: steps must be >= 1, got {}", steps));
  if (!(step_size > 0))
    throw DomainError(fmt::format("config: step_size must be > 0, got {}", step_size));
  if (!(init_depth > 0))
    throw DomainError(fmt::format("config: init_depth must be > 0, got {}", init_depth));
  if (!(init_albedo.s > 0) || !(init_albedo.s < 1))
    throw DomainError(
        "config: init saturation must lie strictly inside (0,1) for the "
        "logistic reparameterization");
  init_albedo.validate();
  weights.validate();
}

namespace {

Real fract(Real x) { return x - std::floor(x); }

Real logistic(Real x) { return 1 / (1 + std::exp(-x)); }

Real logit(Real s) {
  if (!(s > 0) || !(s < 1))
    throw DomainError(fmt::format(
        "encode: saturation {} is not representable (needs 0 < s < 1)", s));
  return std::log(s / (1 - s));
}

void check_finite(const RecoveryState& state) {
  const auto scan = [](const ScalarField& f, const char* name) {
    for (Eigen::Index v = 0; v < f.rows(); ++v)
      for (Eigen::Index u = 0; u < f.cols(); ++u)
        if (!std::isfinite(f(v, u)))
          throw NumericError(fmt::format(
              "loss_gradient: non-finite {} at pixel ({}, {})", name, u, v));
  };
  scan(state.log_depth, "log-depth");
  scan(state.albedo_logits.ch[0], "hue logit");
  scan(state.albedo_logits.ch[1], "saturation logit");
}

}  // namespace

Decoded decode(const RecoveryState& state) {
  Decoded out;
  out.depth = state.log_depth.exp();
  out.albedo.resize(state.albedo_logits.rows(), state.albedo_logits.cols());
  out.albedo.ch[0] = state.albedo_logits.ch[0].unaryExpr([](Real x) { return fract(x); });
  out.albedo.ch[1] = state.albedo_logits.ch[1].unaryExpr([](Real x) { return logistic(x); });
  return out;
}

RecoveryState encode(const ScalarField& depth, const AlbedoField& albedo,
                     const LossWeights& weights) {
  require_same_shape("encode: depth vs albedo", depth, albedo);
  RecoveryState state;
  state.weights = weights;
  state.log_depth.resize(depth.rows(), depth.cols());
  for (Eigen::Index v = 0; v < depth.rows(); ++v)
    for (Eigen::Index u = 0; u < depth.cols(); ++u) {
      if (!(depth(v, u) > 0))
        throw DomainError(fmt::format(
            "encode: depth must be positive at pixel ({}, {}), got {}", u, v,
            depth(v, u)));
      state.log_depth(v, u) = std::log(depth(v, u));
    }
  state.albedo_logits.resize(depth.rows(), depth.cols());
  state.albedo_logits.ch[0] = albedo.ch[0].unaryExpr([](Real x) { return fract(x); });
  state.albedo_logits.ch[1] = albedo.ch[1].unaryExpr([](Real s) { return logit(s); });
  return state;
}

LossGradient loss_gradient(const RecoveryState& state,
                           const ColorImage& observed, const LightModel& light,
                           const CameraModel& cam) {
  cam.validate();
  light.validate();
  state.weights.validate();
  check_finite(state);
  require_same_shape("loss_gradient: parameters vs observed", state.log_depth,
                     observed);
  require_same_shape("loss_gradient: albedo vs depth parameters",
                     state.albedo_logits, state.log_depth);

  const VectorField rays = build_ray_field(cam);
  const Decoded dec = decode(state);
  const ScalarField& depth = dec.depth;
  const NormalMap normals = normals_six_neighbor(depth, rays);
  const Eigen::Index h = depth.rows(), w = depth.cols();

  // Forward pass, keeping per-pixel intermediates for the pullback.
  std::vector<ShadeParts> parts(static_cast<std::size_t>(h * w));
  std::vector<Vec3> rho(parts.size());
  ColorImage rendered(h, w);
  parallel_rows(h, [&](Eigen::Index v0, Eigen::Index v1) {
    for (Eigen::Index v = v0; v < v1; ++v)
      for (Eigen::Index u = 0; u < w; ++u) {
        const std::size_t i = static_cast<std::size_t>(v * w + u);
        rho[i] = hsv_to_rgb({dec.albedo.ch[0](v, u), dec.albedo.ch[1](v, u)});
        parts[i] = shade_pixel(light, rays.at(v, u), depth(v, u), rho[i],
                               normals.at(v, u));
        rendered.set(v, u, parts[i].color);
      }
  });

  LossBreakdown losses;
  losses.photometric = photometric_loss(observed, rendered);
  losses.smoothness = smoothness_loss(depth, observed);
  losses.specular = specular_loss(observed, depth, normals, rays, light,
                                  state.weights.th);
  losses.total = losses.photometric + state.weights.lambda_s * losses.smoothness +
                 state.weights.lambda_sp * losses.specular;

  ScalarField d_depth = ScalarField::Zero(h, w);  // dL/d(decoded depth)
  VectorField grad_n(h, w);                       // dL/d(normal map)
  AlbedoField d_hs(h, w);                         // dL/d(decoded hue, sat)

  // Photometric path: color -> radiance -> irradiance -> (depth, normal)
  // and radiance -> albedo. Writes are per-pixel disjoint.
  const Real photo_norm = Real(1) / static_cast<Real>(h * w * 3);
  parallel_rows(h, [&](Eigen::Index v0, Eigen::Index v1) {
    for (Eigen::Index v = v0; v < v1; ++v)
      for (Eigen::Index u = 0; u < w; ++u) {
        const std::size_t i = static_cast<std::size_t>(v * w + u);
        const ShadeParts& pp = parts[i];
        const Vec3 col_bar =
            2 * (pp.color - observed.at(v, u)) * photo_norm;
        const Vec3 rad_bar = col_bar.cwiseProduct(gamma_slope(light, pp));
        const Real e_bar = light.gain * rad_bar.dot(rho[i]);
        const Vec3 rho_bar = light.gain * pp.irradiance * rad_bar;
        const IrradianceGrad ig = irradiance_gradient(light, pp);
        d_depth(v, u) += e_bar * ig.d_x.dot(rays.at(v, u));
        grad_n.set(v, u, e_bar * ig.d_n);
        const Eigen::Matrix<Real, 3, 2> jac = hsv_to_rgb_jacobian(
            {dec.albedo.ch[0](v, u), dec.albedo.ch[1](v, u)});
        d_hs.ch[0](v, u) = rho_bar.dot(jac.col(0));
        d_hs.ch[1](v, u) = rho_bar.dot(jac.col(1));
      }
  });

  // Specular path: the mask depends only on the observed image.
  if (state.weights.lambda_sp > 0) {
    Eigen::Index masked = 0;
    for (Eigen::Index v = 0; v < h; ++v)
      for (Eigen::Index u = 0; u < w; ++u)
        if (observed.at(v, u).maxCoeff() > state.weights.th) ++masked;
    if (masked > 0) {
      const Real scale = state.weights.lambda_sp * 2 / static_cast<Real>(masked);
      for (Eigen::Index v = 0; v < h; ++v)
        for (Eigen::Index u = 0; u < w; ++u) {
          if (observed.at(v, u).maxCoeff() <= state.weights.th) continue;
          const Vec3 ray = rays.at(v, u);
          const Vec3 n = normals.at(v, u);
          const Vec3 x = depth(v, u) * ray;
          const Vec3 to_light = light.position - x;
          const Real dist = to_light.norm();
          const Vec3 l = to_light / dist;
          const Real a = n.dot(l);
          const Vec3 s = 2 * a * n - l;
          const Real resid = s.dot(-ray) - 1;
          const Vec3 s_bar = scale * resid * -ray;
          const Vec3 n_bar = 2 * (a * s_bar + n.dot(s_bar) * l);
          const Vec3 l_bar = 2 * n.dot(s_bar) * n - s_bar;
          // l = (x_l - x)/dist: dl/dx = -(I - l l^T)/dist (symmetric).
          const Vec3 x_bar = -(l_bar - l * l.dot(l_bar)) / dist;
          grad_n.set(v, u, grad_n.at(v, u) + n_bar);
          d_depth(v, u) += x_bar.dot(ray);
        }
    }
  }

  // Smoothness path (edge weights are observed-image constants).
  if (state.weights.lambda_s > 0) {
    const auto sign = [](Real x) -> Real { return x > 0 ? 1 : (x < 0 ? -1 : 0); };
    if (w > 1) {
      const Real norm_x = state.weights.lambda_s / static_cast<Real>(h * (w - 1));
      for (Eigen::Index v = 0; v < h; ++v)
        for (Eigen::Index u = 0; u + 1 < w; ++u) {
          Real di = 0;
          for (int c = 0; c < 3; ++c)
            di += std::abs(observed.ch[c](v, u + 1) - observed.ch[c](v, u));
          const Real g = sign(depth(v, u + 1) - depth(v, u)) *
                         std::exp(-di / 3) * norm_x;
          d_depth(v, u + 1) += g;
          d_depth(v, u) -= g;
        }
    }
    if (h > 1) {
      const Real norm_y = state.weights.lambda_s / static_cast<Real>((h - 1) * w);
      for (Eigen::Index v = 0; v + 1 < h; ++v)
        for (Eigen::Index u = 0; u < w; ++u) {
          Real di = 0;
          for (int c = 0; c < 3; ++c)
            di += std::abs(observed.ch[c](v + 1, u) - observed.ch[c](v, u));
          const Real g = sign(depth(v + 1, u) - depth(v, u)) *
                         std::exp(-di / 3) * norm_y;
          d_depth(v + 1, u) += g;
          d_depth(v, u) -= g;
        }
    }
  }

  // Normal-map gradients flow back to the 7-point depth stencil.
  normals_six_neighbor_backward(depth, rays, grad_n, d_depth);

  LossGradient out;
  out.losses = losses;
  out.rendered = rendered;
  out.d_log_depth = d_depth * depth;  // d = exp(log d)
  out.d_albedo_logits.resize(h, w);
  out.d_albedo_logits.ch[0] = d_hs.ch[0];  // fract has unit slope
  const ScalarField& s_field = dec.albedo.ch[1];
  out.d_albedo_logits.ch[1] = d_hs.ch[1] * s_field * (1 - s_field);
  return out;
}

LossGradient loss_gradient_fd(const RecoveryState& state,
                              const ColorImage& observed,
                              const LightModel& light, const CameraModel& cam,
                              Real h) {
  check_finite(state);
  const VectorField rays = build_ray_field(cam);
  const auto eval = [&](const RecoveryState& s) {
    const Decoded dec = decode(s);
    return total_loss(observed, dec.depth, dec.albedo, light, rays,
                      s.weights).total;
  };

  LossGradient out;
  {
    const Decoded dec = decode(state);
    const NormalMap normals = normals_six_neighbor(dec.depth, rays);
    out.rendered = render_image(light, rays, dec.depth, dec.albedo, normals);
    out.losses = total_loss(observed, dec.depth, dec.albedo, light, rays,
                            state.weights);
  }
  const Eigen::Index rows = state.log_depth.rows(), cols = state.log_depth.cols();
  out.d_log_depth.resize(rows, cols);
  out.d_albedo_logits.resize(rows, cols);
  RecoveryState probe = state;
  const auto central = [&](ScalarField& field, Eigen::Index v, Eigen::Index u) {
    const Real saved = field(v, u);
    field(v, u) = saved + h;
    const Real up = eval(probe);
    field(v, u) = saved - h;
    const Real down = eval(probe);
    field(v, u) = saved;
    return (up - down) / (2 * h);
  };
  for (Eigen::Index v = 0; v < rows; ++v)
    for (Eigen::Index u = 0; u < cols; ++u) {
      out.d_log_depth(v, u) = central(probe.log_depth, v, u);
      out.d_albedo_logits.ch[0](v, u) = central(probe.albedo_logits.ch[0], v, u);
      out.d_albedo_logits.ch[1](v, u) = central(probe.albedo_logits.ch[1], v, u);
    }
  return out;
}

RecoveryResult recover(const ColorImage& observed, const LightModel& light,
                       const CameraModel& cam, const RecoveryConfig& config,
                       const StepCallback& on_step) {
  config.validate();
  cam.validate();
  light.validate();
  if (observed.rows() != cam.height || observed.cols() != cam.width)
    throw ShapeError(fmt::format(
        "recover: image is {} but the camera expects {}",
        shape_str(observed.rows(), observed.cols()),
        shape_str(cam.height, cam.width)));

  RecoveryState state;
  state.weights = config.weights;
  if (config.init_depth_field) {
    require_same_shape("recover: init depth vs image", *config.init_depth_field,
                       observed);
    AlbedoField albedo_init;
    if (config.init_albedo_field) {
      require_same_shape("recover: init albedo vs image",
                         *config.init_albedo_field, observed);
      albedo_init = *config.init_albedo_field;
    } else {
      albedo_init.resize(cam.height, cam.width);
      albedo_init.ch[0].setConstant(config.init_albedo.h);
      albedo_init.ch[1].setConstant(config.init_albedo.s);
    }
    state = encode(*config.init_depth_field, albedo_init, config.weights);
  } else {
    state.log_depth =
        ScalarField::Constant(cam.height, cam.width, std::log(config.init_depth));
    state.albedo_logits.resize(cam.height, cam.width);
    if (config.init_albedo_field) {
      require_same_shape("recover: init albedo vs image",
                         *config.init_albedo_field, observed);
      state.albedo_logits.ch[0] = config.init_albedo_field->ch[0];
      for (Eigen::Index v = 0; v < cam.height; ++v)
        for (Eigen::Index u = 0; u < cam.width; ++u)
          state.albedo_logits.ch[1](v, u) =
              logit(config.init_albedo_field->ch[1](v, u));
    } else {
      state.albedo_logits.ch[0].setConstant(config.init_albedo.h);
      state.albedo_logits.ch[1].setConstant(logit(config.init_albedo.s));
    }
  }

  AdamParams adam{config.step_size};
  AdamState opt_depth, opt_hue, opt_sat;
  opt_depth.init(cam.height, cam.width);
  opt_hue.init(cam.height, cam.width);
  opt_sat.init(cam.height, cam.width);

  for (int t = 1; t <= config.steps; ++t) {
    const LossGradient g =
        config.grad_mode == GradMode::analytic
            ? loss_gradient(state, observed, light, cam)
            : loss_gradient_fd(state, observed, light, cam);
    if (!std::isfinite(g.losses.total))
      throw NumericError(fmt::format("recover: loss diverged at step {}", t));
    state.loss_history.push_back(g.losses);
    if (on_step) on_step(t, g.losses);
    adam_step(state.log_depth, g.d_log_depth, opt_depth, t, adam);
    adam_step(state.albedo_logits.ch[0], g.d_albedo_logits.ch[0], opt_hue, t, adam);
    adam_step(state.albedo_logits.ch[1], g.d_albedo_logits.ch[1], opt_sat, t, adam);
    state.step = t;
  }

  RecoveryResult result;
  const Decoded dec = decode(state);
  const VectorField rays = build_ray_field(cam);
  result.depth = dec.depth;
  result.albedo = dec.albedo;
  result.normals = normals_six_neighbor(dec.depth, rays);
  result.rendered =
      render_image(light, rays, dec.depth, dec.albedo, result.normals);
  result.history = std::move(state.loss_history);
  return result;
}

}  // namespace lume
