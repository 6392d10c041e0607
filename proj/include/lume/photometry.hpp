/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "lume/types.hpp"

namespace lume {

/// Spotlight source co-located with (or near) the camera. Distances in mm,
/// camera frame.
struct LightModel {
  Vec3 position = Vec3::Zero();
  Vec3 axis = Vec3(0, 0, 1);  ///< principal direction, unit length
  Real mu = 0;                ///< radial spread factor, >= 0
  Real sigma0 = 1;            ///< max radiance (conventionally 1)
  Real gain = 1;              ///< camera gain (conventionally 1)
  Real gamma = 1;             ///< display gamma, >= 1

  /// Throws DomainError on a non-unit axis or out-of-range scalar.
  void validate() const;
};

/// Hue/saturation albedo; value is pinned at 1 so two channels suffice.
struct AlbedoHS {
  Real h = 0;  ///< hue in [0,1), wraps
  Real s = 0;  ///< saturation in [0,1]

  void validate() const;
};

struct ShadingSample {
  Vec3 radiance_rgb;  ///< pre-gamma linear values, >= 0
  Vec3 color_rgb;     ///< post-gamma color, clamped to [0,1]
};

/// R(psi) = exp(-mu * (1 - cos psi)). psi must lie in [0, pi].
Real radial_attenuation(const LightModel& light, Real psi);

/// Angle between the light axis and the direction from the light to x.
/// Throws DomainError when x coincides with the light position.
Real off_axis_angle(const LightModel& light, const Vec3& x);

/// sigma0 / ||x - x_l||^2 * R(psi) * max(0, l.n), with l the unit
/// surface-to-light direction. The cosine clamp models self-shadowing.
Real irradiance_geometry(const LightModel& light, const Vec3& x, const Vec3& n);

/// Standard hexcone HSV -> RGB with V = 1.
Vec3 hsv_to_rgb(const AlbedoHS& albedo);

/// Per-channel Jacobian of hsv_to_rgb: columns d(rgb)/dh and d(rgb)/ds.
/// One-sided at sector boundaries (the map is continuous there).
Eigen::Matrix<Real, 3, 2> hsv_to_rgb_jacobian(const AlbedoHS& albedo);

/// Everything the shading chain computes at one pixel, kept so gradient
/// code can reuse the forward terms instead of re-deriving them.
struct ShadeParts {
  Vec3 x;             ///< surface point d * ray
  Vec3 n;             ///< the normal the pixel was shaded with
  Vec3 w_hat;         ///< unit light-to-surface direction
  Real dist = 0;      ///< ||x - light.position||
  Real cos_psi = 0;   ///< axis . w_hat
  Real atten = 0;     ///< R(psi)
  Real q = 0;         ///< sigma0 * atten / dist^2
  Real cos_theta = 0; ///< incidence cosine before clamping (l . n)
  Real irradiance = 0;///< q * max(0, cos_theta)
  Vec3 radiance;      ///< irradiance * albedo_rgb * gain
  Vec3 color;         ///< min(1, radiance^(1/gamma))
};

/// Full shading chain at one pixel. Throws DomainError on d <= 0 or a
/// degenerate x == light position.
ShadeParts shade_pixel(const LightModel& light, const Vec3& ray, Real d,
                       const Vec3& albedo_rgb, const Vec3& n);

/// ShadingSample view of shade_pixel.
ShadingSample render_pixel(const LightModel& light, const Vec3& ray, Real d,
                           const Vec3& albedo_rgb, const Vec3& n);

/// Derivatives of the irradiance E with respect to the surface point, the
/// normal, and the spread factor. The derivative with respect to the light
/// position is -d_x (E depends on x and x_l only through x - x_l).
struct IrradianceGrad {
  Vec3 d_x = Vec3::Zero();
  Vec3 d_n = Vec3::Zero();
  Real d_mu = 0;
};
IrradianceGrad irradiance_gradient(const LightModel& light,
                                   const ShadeParts& parts);

/// d(color_c)/d(radiance_c): (1/gamma) * radiance^(1/gamma - 1) on the open
/// interval (0,1), zero on the clamped branches (subgradient choice).
Vec3 gamma_slope(const LightModel& light, const ShadeParts& parts);

/// Renders the whole image: hsv_to_rgb on the albedo field, then
/// render_pixel everywhere. All fields must share one resolution and depth
/// must be strictly positive.
ColorImage render_image(const LightModel& light, const VectorField& rays,
                        const ScalarField& depth, const AlbedoField& albedo,
                        const VectorField& normals);

}  // namespace lume
