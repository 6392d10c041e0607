/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "lume/types.hpp"

namespace lume {

/// Pinhole intrinsics. Pixel centers sit at integer coordinates, the origin
/// is the top-left pixel, u runs rightward, v downward and the camera looks
/// along +z (right-handed with y down).
struct CameraModel {
  Real fx = 0;  ///< focal length in pixels
  Real fy = 0;
  Real cx = 0;  ///< principal point in pixels
  Real cy = 0;
  int width = 0;
  int height = 0;

  /// Throws DomainError unless fx,fy > 0 and width,height >= 3.
  void validate() const;
};

/// Back-projects a (sub-)pixel coordinate to the unit ray through it, i.e.
/// normalize(((u - cx)/fx, (v - cy)/fy, 1)).
Vec3 inverse_project(const CameraModel& cam, const Vec2& pixel);

/// Unit ray per pixel center; at(v, u).z() > 0 everywhere.
VectorField build_ray_field(const CameraModel& cam);

/// x = d * ray with d the Euclidean distance (mm) along the unit ray.
/// Throws DomainError unless depth > 0.
Vec3 surface_point(const Vec3& ray, Real depth);

}  // namespace lume
