/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <random>

#include "lume/geometry.hpp"
#include "lume/photometry.hpp"
#include "lume/types.hpp"

namespace lume::test {

inline CameraModel small_camera(int width = 8, int height = 8, Real f = 10) {
  CameraModel cam;
  cam.fx = f;
  cam.fy = f;
  cam.cx = (width - 1) / 2.0;
  cam.cy = (height - 1) / 2.0;
  cam.width = width;
  cam.height = height;
  return cam;
}

inline LightModel simple_light() {
  LightModel light;
  light.position = Vec3::Zero();
  light.axis = Vec3(0, 0, 1);
  light.mu = 0;
  light.sigma0 = 1;
  light.gain = 1;
  light.gamma = 1;
  return light;
}

/// Uniform in [lo, hi), reproducible across platforms.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  Real operator()(Real lo = 0, Real hi = 1) {
    const Real u = (rng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 rng_;
};

inline ScalarField random_field(Eigen::Index rows, Eigen::Index cols, Real lo,
                                Real hi, std::uint64_t seed) {
  Uniform uniform(seed);
  ScalarField field(rows, cols);
  for (Eigen::Index v = 0; v < rows; ++v)
    for (Eigen::Index u = 0; u < cols; ++u) field(v, u) = uniform(lo, hi);
  return field;
}

inline ColorImage random_image(Eigen::Index rows, Eigen::Index cols,
                               std::uint64_t seed) {
  Uniform uniform(seed);
  ColorImage image(rows, cols);
  for (Eigen::Index v = 0; v < rows; ++v)
    for (Eigen::Index u = 0; u < cols; ++u)
      for (int c = 0; c < 3; ++c) image.ch[c](v, u) = uniform();
  return image;
}

/// Depth field of the fronto-parallel plane z = c (ray distance per pixel).
inline ScalarField frontal_plane_depth(const CameraModel& cam, Real z) {
  const VectorField rays = build_ray_field(cam);
  ScalarField depth(cam.height, cam.width);
  for (Eigen::Index v = 0; v < cam.height; ++v)
    for (Eigen::Index u = 0; u < cam.width; ++u)
      depth(v, u) = z / rays.at(v, u).z();
  return depth;
}

}  // namespace lume::test
