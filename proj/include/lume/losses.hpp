/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "lume/normals.hpp"
#include "lume/photometry.hpp"
#include "lume/types.hpp"

namespace lume {

struct LossWeights {
  Real lambda_s = 0.1;   ///< smoothness weight
  Real lambda_sp = 1.0;  ///< specular weight
  Real th = 0.98;        ///< saturation mask threshold in [0,1]

  void validate() const;
};

struct LossBreakdown {
  Real photometric = 0;
  Real smoothness = 0;
  Real specular = 0;
  Real total = 0;  ///< photometric + lambda_s*smoothness + lambda_sp*specular
};

/// Mean over pixels and channels of (observed - rendered)^2. Means rather
/// than sums keep the lambda weights resolution-independent.
Real photometric_loss(const ColorImage& observed, const ColorImage& rendered);

/// Edge-aware first-order smoothness: mean of |dx depth| * exp(-|dx image|)
/// over the forward-differenceable pixels in x, plus the same in y. Image
/// gradient magnitudes are averaged over channels.
Real smoothness_loss(const ScalarField& depth, const ColorImage& image);

/// Mirror reflection of the surface-to-light direction about the normal:
/// s = 2n(n.l) - l. Inputs must be unit within 1e-6.
Vec3 specular_direction(const Vec3& l, const Vec3& n);

/// Mean over masked pixels (max RGB of image > th) of (s.(-ray) - 1)^2,
/// where s reflects the surface-to-light direction derived from the depth
/// at each masked pixel. Zero when the mask is empty.
Real specular_loss(const ColorImage& image, const ScalarField& depth,
                   const NormalMap& normals, const VectorField& rays,
                   const LightModel& light, Real th);

/// Renders the depth/albedo candidate with six-neighbor normals and
/// evaluates all three terms against the observed image.
LossBreakdown total_loss(const ColorImage& observed, const ScalarField& depth,
                         const AlbedoField& albedo, const LightModel& light,
                         const VectorField& rays, const LossWeights& weights);

}  // namespace lume
