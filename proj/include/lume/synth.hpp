/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstdint>
#include <vector>

#include "lume/geometry.hpp"
#include "lume/normals.hpp"
#include "lume/photometry.hpp"
#include "lume/types.hpp"

namespace lume {

enum class SceneKind { plane, sphere, tube };

/// Two-tone stripe texture: points with fract(frequency * p.z) < width get
/// the stripe color, the rest the base color. frequency == 0 paints the
/// base color everywhere (constant albedo).
struct StripeTexture {
  AlbedoHS base{0.0, 0.0};
  AlbedoHS stripe{0.0, 0.0};
  Real frequency = 0;  ///< stripe cycles per mm of p.z
  Real width = 0.5;    ///< stripe fraction of each period, in [0,1]
};

struct SceneSpec {
  SceneKind kind = SceneKind::plane;

  // plane: passes through plane_point with the given (non-zero) normal.
  Vec3 plane_point = Vec3(0, 0, 50);
  Vec3 plane_normal = Vec3(0, 0, -1);

  // sphere: must cover the full field of view from the camera at origin.
  Vec3 sphere_center = Vec3(0, 0, 80);
  Real sphere_radius = 30;

  // tube: camera sits inside a chain of capsules (cylinders with spherical
  // joints and end caps) along the polyline. An empty polyline means a
  // straight tube from the origin along +z of the given length.
  std::vector<Vec3> tube_axis;
  Real tube_radius = 20;
  Real tube_length = 100;

  StripeTexture texture;
  CameraModel camera;
  LightModel light;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruthBundle {
  ColorImage image;     ///< rendered by the library renderer
  ScalarField depth;    ///< ray distance to the surface, mm
  NormalMap normals;    ///< analytic, camera-facing
  AlbedoField albedo;   ///< hue/saturation at the hit point
};

/// Ray-casts the scene. Every camera ray must hit the surface; a miss is a
/// coverage error naming the pixel. The bundle image always equals
/// render_image of the bundle's own depth/albedo/normals bitwise.
GroundTruthBundle cast(const SceneSpec& scene);

/// depth * (1 + amplitude * B): B is seeded blurred noise with zero mean
/// and max |B| <= 1, blurred over roughly `smoothness` pixels. Bitwise
/// reproducible for a fixed seed.
ScalarField perturb_depth(const ScalarField& depth, Real amplitude,
                          Real smoothness, std::uint64_t seed);

}  // namespace lume
