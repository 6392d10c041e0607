/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "lume/geometry.hpp"
#include "lume/losses.hpp"
#include "lume/types.hpp"

namespace lume {

/// First-order adaptive-moment descent over an elementwise parameter grid.
struct AdamParams {
  Real step_size = 1e-2;
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real epsilon = 1e-8;
};

struct AdamState {
  ScalarField m;  ///< first-moment estimate
  ScalarField v;  ///< second-moment estimate

  void init(Eigen::Index rows, Eigen::Index cols) {
    m = ScalarField::Zero(rows, cols);
    v = ScalarField::Zero(rows, cols);
  }
};

/// One bias-corrected update in place; t counts steps from 1.
void adam_step(ScalarField& theta, const ScalarField& grad, AdamState& state,
               int t, const AdamParams& params);

enum class GradMode { analytic, finite_difference };

/// Unconstrained optimizer variables. Decoding maps log_depth through exp,
/// raw hue through fract, and raw saturation through the logistic squash,
/// so any finite parameters yield a valid depth/albedo pair.
struct RecoveryState {
  ScalarField log_depth;
  AlbedoField albedo_logits;  ///< ch0 = raw hue, ch1 = raw saturation
  LossWeights weights;
  int step = 0;
  std::vector<LossBreakdown> loss_history;
};

struct RecoveryConfig {
  int steps = 20;
  Real step_size = 1e-2;
  LossWeights weights;
  GradMode grad_mode = GradMode::analytic;
  Real init_depth = 1.0;                ///< constant-depth init (mm)
  AlbedoHS init_albedo{0.0, 0.2};       ///< near-gray (s = 0 is not
                                        ///  representable under the squash)
  std::optional<ScalarField> init_depth_field;   ///< overrides init_depth
  std::optional<AlbedoField> init_albedo_field;  ///< overrides init_albedo

  void validate() const;
};

struct Decoded {
  ScalarField depth;
  AlbedoField albedo;
};

/// d = exp(log_depth); h = fract(raw_h); s = logistic(raw_s).
Decoded decode(const RecoveryState& state);

/// Inverse of decode, used to seed a state from fields.
RecoveryState encode(const ScalarField& depth, const AlbedoField& albedo,
                     const LossWeights& weights);

struct LossGradient {
  LossBreakdown losses;
  ScalarField d_log_depth;
  AlbedoField d_albedo_logits;
  ColorImage rendered;
};

/// Analytic gradient of the total loss through render -> normals -> losses.
/// The normals path gives each pixel's depth a 7-point stencil of
/// influence. Throws NumericError (naming the first offending pixel) on
/// non-finite parameters.
LossGradient loss_gradient(const RecoveryState& state,
                           const ColorImage& observed, const LightModel& light,
                           const CameraModel& cam);

/// Central finite differences of the same objective, for validation only.
LossGradient loss_gradient_fd(const RecoveryState& state,
                              const ColorImage& observed,
                              const LightModel& light, const CameraModel& cam,
                              Real h = 1e-5);

struct RecoveryResult {
  ScalarField depth;
  AlbedoField albedo;
  NormalMap normals;
  ColorImage rendered;
  std::vector<LossBreakdown> history;
};

/// Invoked after every optimizer step with the step index (from 1) and the
/// losses evaluated at the pre-step parameters.
using StepCallback = std::function<void(int, const LossBreakdown&)>;

/// Runs config.steps Adam updates from the configured init and returns the
/// decoded fields, the final render, and the per-step loss history.
/// Throws NumericError naming the step index if the loss turns non-finite.
RecoveryResult recover(const ColorImage& observed, const LightModel& light,
                       const CameraModel& cam, const RecoveryConfig& config,
                       const StepCallback& on_step = {});

}  // namespace lume
