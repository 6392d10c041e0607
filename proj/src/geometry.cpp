/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "lume/geometry.hpp"

#include <fmt/core.h>

#include "lume/errors.hpp"

namespace lume {

void CameraModel::validate() const {
  if (!(fx > 0) || !(fy > 0))
    throw DomainError(fmt::format("camera: focal lengths must be positive, got fx={} fy={}", fx, fy));
  if (width < 3 || height < 3)
    throw DomainError(fmt::format("camera: image must be at least 3x3 pixels, got {}x{}", width, height));
}

Vec3 inverse_project(const CameraModel& cam, const Vec2& pixel) {
  const Real u = pixel.x();
  const Real v = pixel.y();
  if (!(u >= 0) || !(u < cam.width) || !(v >= 0) || !(v < cam.height))
    throw DomainError(
        fmt::format("inverse_project: pixel ({}, {}) outside image domain [0,{})x[0,{})",
                    u, v, cam.width, cam.height));
  Vec3 dir((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, Real(1));
  return dir.normalized();
}

VectorField build_ray_field(const CameraModel& cam) {
  cam.validate();
  VectorField rays(cam.height, cam.width);
  for (int v = 0; v < cam.height; ++v)
    for (int u = 0; u < cam.width; ++u)
      rays.set(v, u, inverse_project(cam, Vec2(u, v)));
  return rays;
}

Vec3 surface_point(const Vec3& ray, Real depth) {
  if (!(depth > 0))
    throw DomainError(fmt::format("surface_point: depth must be positive, got {}", depth));
  return depth * ray;
}

}  // namespace lume
