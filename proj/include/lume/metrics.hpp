/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <utility>

#include "lume/normals.hpp"
#include "lume/types.hpp"

namespace lume {

/// Median with the lower-middle convention for even counts (bitwise
/// reproducible, no averaging).
Real median(const ScalarField& field);

/// Scales pred by median(gt)/median(pred). Both fields must be positive.
std::pair<ScalarField, Real> median_align(const ScalarField& pred,
                                          const ScalarField& gt);

struct DepthMetrics {
  Real mae = 0;       ///< mean |pred - gt|, mm
  Real medae = 0;     ///< median |pred - gt|, mm
  Real rmse = 0;      ///< sqrt(mean (pred - gt)^2), mm
  Real rmse_log = 0;  ///< sqrt(mean (log pred - log gt)^2)
  Real abs_rel = 0;   ///< mean |pred - gt| / gt
  Real sq_rel = 0;    ///< mean (pred - gt)^2 / gt
  Real delta1 = 0;    ///< fraction with max(pred/gt, gt/pred) < 1.25
  Real delta2 = 0;    ///< ... < 1.25^2
  Real delta3 = 0;    ///< ... < 1.25^3
};

/// The nine depth error measures, after median alignment unless disabled.
DepthMetrics depth_metrics(const ScalarField& pred, const ScalarField& gt,
                           bool align = true);

/// Mean angular error in degrees between unit normal fields.
Real normal_mae(const NormalMap& pred, const NormalMap& gt);

/// Single-scale structural similarity: 11-tap Gaussian window (sigma 1.5),
/// C1 = 0.01^2, C2 = 0.03^2, valid windows only (no padding), computed per
/// channel on [0,1] data and averaged. Images must be at least 11x11.
Real ssim(const ColorImage& a, const ColorImage& b);

/// Mean absolute difference over pixels and channels, on [0,1] data.
Real image_mae(const ColorImage& a, const ColorImage& b);

struct MetricsReport {
  Real scale = 1;  ///< median-alignment factor applied to pred depth
  DepthMetrics depth;
  Real normal_mae_deg = 0;
  Real ssim = 0;
  Real image_mae = 0;
};

/// Full suite over one prediction/ground-truth pair: depth metrics after
/// median alignment, normal angular MAE, SSIM and image MAE.
MetricsReport evaluate(const ScalarField& pred_depth,
                       const ScalarField& gt_depth,
                       const NormalMap& pred_normals,
                       const NormalMap& gt_normals,
                       const ColorImage& pred_image,
                       const ColorImage& gt_image);

}  // namespace lume
