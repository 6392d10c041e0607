/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <utility>
#include <vector>

#include "lume/geometry.hpp"
#include "lume/normals.hpp"
#include "lume/photometry.hpp"
#include "lume/types.hpp"

namespace lume {

/// One calibration shot: an image of known geometry and albedo.
struct CalibObservation {
  ColorImage image;
  ScalarField depth;
  NormalMap normals;
  AlbedoField albedo;

  void validate() const;
};

struct CalibReport {
  std::vector<Real> rms_gray_levels;  ///< per observation, post-gamma x255
  Real objective = 0;                 ///< final mean squared residual
  int iterations = 0;
  bool converged = false;
  bool conditioning_warning = false;  ///< geometry too uniform to separate
                                      ///  mu from the position
};

struct CalibOptions {
  int max_iterations = 20000;
  bool fit_mu = true;  ///< false holds mu at the init value (position-only)
};

/// Fits the light position and spread by least squares on the post-gamma
/// photometric residual, using the same adaptive-moment descent as the
/// recovery optimizer with analytic gradients. sigma0, gain, gamma and the
/// axis are taken from `init` and held fixed (the calibration convention
/// sets sigma0 = gain = 1). Returns the best model found; `converged`
/// is false when the iteration budget ran out first.
std::pair<LightModel, CalibReport> calibrate_light(
    const std::vector<CalibObservation>& observations, const CameraModel& cam,
    const LightModel& init, const CalibOptions& opts = {});

}  // namespace lume
