/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "lume/synth.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lume/errors.hpp"

namespace lume {

namespace {

constexpr Real kMinHit = 1e-9;

Real fract(Real x) { return x - std::floor(x); }

struct Hit {
  Real t = 0;
  Vec3 normal = Vec3::Zero();  // geometric; oriented later
};

Hit intersect_plane(const SceneSpec& scene, const Vec3& ray, Eigen::Index u,
                    Eigen::Index v) {
  const Vec3 n = scene.plane_normal.normalized();
  const Real denom = ray.dot(n);
  const Real t = scene.plane_point.dot(n) / denom;
  if (!(std::abs(denom) > 1e-12) || !(t > kMinHit))
    throw DomainError(fmt::format(
        "cast: ray at pixel ({}, {}) misses the plane (no full coverage)", u, v));
  return {t, n};
}

Hit intersect_sphere(const SceneSpec& scene, const Vec3& ray, Eigen::Index u,
                     Eigen::Index v) {
  // |t ray - c|^2 = R^2 with the camera at the origin.
  const Vec3& c = scene.sphere_center;
  const Real b = ray.dot(c);
  const Real disc = b * b - c.squaredNorm() + scene.sphere_radius * scene.sphere_radius;
  if (disc >= 0) {
    const Real root = std::sqrt(disc);
    for (const Real t : {b - root, b + root})
      if (t > kMinHit)
        return {t, Vec3((t * ray - c) / scene.sphere_radius)};
  }
  throw DomainError(fmt::format(
      "cast: ray at pixel ({}, {}) misses the sphere (no full coverage)", u, v));
}

struct Interval {
  Real lo, hi;
};

// The tube is a union of capsules: one finite cylinder per polyline segment
// plus a sphere at every vertex (joints and both end caps). The camera
// starts inside; its depth is where the ray leaves the union, so overlapped
// interior boundaries never show.
struct TubeShape {
  std::vector<Vec3> points;
  Real radius = 0;

  // Inside-intervals of the ray (origin 0, unit dir) for every primitive.
  void intervals(const Vec3& ray, std::vector<Interval>& out) const {
    const Real r2 = radius * radius;
    for (const Vec3& c : points) {
      const Real b = ray.dot(c);
      const Real disc = b * b - c.squaredNorm() + r2;
      if (disc >= 0) {
        const Real s = std::sqrt(disc);
        out.push_back({b - s, b + s});
      }
    }
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      const Vec3& a = points[i];
      const Vec3 seg = points[i + 1] - a;
      const Real len = seg.norm();
      const Vec3 axis = seg / len;
      // Radial bound: |m + t d|^2 <= radius^2 with the axis component removed.
      const Vec3 d = ray - ray.dot(axis) * axis;
      const Vec3 m = -a + a.dot(axis) * axis;
      const Real qa = d.squaredNorm();
      const Real qb = 2 * m.dot(d);
      const Real qc = m.squaredNorm() - r2;
      Interval radial{-std::numeric_limits<Real>::infinity(),
                      std::numeric_limits<Real>::infinity()};
      if (qa > 1e-30) {
        const Real disc = qb * qb - 4 * qa * qc;
        if (disc < 0) continue;
        const Real s = std::sqrt(disc);
        radial = {(-qb - s) / (2 * qa), (-qb + s) / (2 * qa)};
      } else if (qc > 0) {
        continue;  // parallel to the axis and outside the radius
      }
      // Axial bound: 0 <= (t ray - a).axis <= len.
      const Real h0 = -a.dot(axis);
      const Real hs = ray.dot(axis);
      Interval axial = radial;
      if (std::abs(hs) > 1e-30) {
        const Real t0 = (0 - h0) / hs;
        const Real t1 = (len - h0) / hs;
        axial = {std::min(t0, t1), std::max(t0, t1)};
      } else if (h0 < 0 || h0 > len) {
        continue;
      }
      const Interval clipped{std::max(radial.lo, axial.lo),
                             std::min(radial.hi, axial.hi)};
      if (clipped.lo < clipped.hi) out.push_back(clipped);
    }
  }

  // Exit distance of the union component containing t = 0.
  Real exit_distance(const Vec3& ray, Eigen::Index u, Eigen::Index v) const {
    std::vector<Interval> spans;
    intervals(ray, spans);
    std::sort(spans.begin(), spans.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    Real cur = 0;
    bool inside = false;
    for (const Interval& span : spans) {
      if (span.hi <= 0) continue;
      if (span.lo > cur + 1e-9) break;  // gap: component ended
      if (span.lo <= 1e-9 || inside) {
        cur = std::max(cur, span.hi);
        inside = true;
      }
    }
    if (!inside)
      throw DomainError(fmt::format(
          "cast: ray at pixel ({}, {}) does not start inside the tube", u, v));
    return cur;
  }

  // Normal of the primitive whose boundary sits at distance t.
  Vec3 normal_at(const Vec3& ray, Real t, Eigen::Index u, Eigen::Index v) const {
    const Vec3 p = t * ray;
    Real best_err = 1e-6 * std::max<Real>(1, t);
    Vec3 best = Vec3::Zero();
    for (const Vec3& c : points) {
      const Real err = std::abs((p - c).norm() - radius);
      if (err < best_err) {
        best_err = err;
        best = (c - p) / radius;  // inward: the camera is inside
      }
    }
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      const Vec3& a = points[i];
      const Vec3 seg = points[i + 1] - a;
      const Real len = seg.norm();
      const Vec3 axis = seg / len;
      const Real along = (p - a).dot(axis);
      if (along < -1e-9 || along > len + 1e-9) continue;
      const Vec3 foot = a + along * axis;
      const Real err = std::abs((p - foot).norm() - radius);
      if (err < best_err) {
        best_err = err;
        best = (foot - p) / radius;
      }
    }
    if (best.squaredNorm() == 0)
      throw DomainError(fmt::format(
          "cast: no tube surface at the exit point of pixel ({}, {})", u, v));
    return best;
  }
};

TubeShape make_tube(const SceneSpec& scene) {
  TubeShape tube;
  tube.radius = scene.tube_radius;
  if (scene.tube_axis.empty())
    tube.points = {Vec3::Zero(), Vec3(0, 0, scene.tube_length)};
  else
    tube.points = scene.tube_axis;
  return tube;
}

AlbedoHS texture_at(const StripeTexture& tex, const Vec3& p) {
  if (tex.frequency > 0 && fract(tex.frequency * p.z()) < tex.width)
    return tex.stripe;
  return tex.base;
}

}  // namespace

void SceneSpec::validate() const {
  camera.validate();
  light.validate();
  texture.base.validate();
  texture.stripe.validate();
  if (!(texture.frequency >= 0))
    throw DomainError(fmt::format("scene: stripe frequency must be >= 0, got {}",
                                  texture.frequency));
  if (!(texture.width >= 0) || !(texture.width <= 1))
    throw DomainError(fmt::format("scene: stripe width must lie in [0,1], got {}",
                                  texture.width));
  switch (kind) {
    case SceneKind::plane:
      if (!(plane_normal.norm() > 0))
        throw DomainError("scene: plane normal must be non-zero");
      break;
    case SceneKind::sphere:
      if (!(sphere_radius > 0))
        throw DomainError(fmt::format("scene: sphere radius must be > 0, got {}",
                                      sphere_radius));
      break;
    case SceneKind::tube:
      if (!(tube_radius > 0))
        throw DomainError(fmt::format("scene: tube radius must be > 0, got {}",
                                      tube_radius));
      if (tube_axis.empty()) {
        if (!(tube_length > 0))
          throw DomainError(fmt::format("scene: tube length must be > 0, got {}",
                                        tube_length));
      } else {
        if (tube_axis.size() < 2)
          throw DomainError("scene: a tube polyline needs at least two points");
        for (std::size_t i = 0; i + 1 < tube_axis.size(); ++i)
          if (!((tube_axis[i + 1] - tube_axis[i]).norm() > 0))
            throw DomainError(
                fmt::format("scene: tube polyline segment {} has zero length", i));
      }
      break;
  }
}

GroundTruthBundle cast(const SceneSpec& scene) {
  scene.validate();
  const VectorField rays = build_ray_field(scene.camera);
  const Eigen::Index h = scene.camera.height, w = scene.camera.width;

  GroundTruthBundle bundle;
  bundle.depth.resize(h, w);
  bundle.normals.resize(h, w);
  bundle.albedo.resize(h, w);

  const TubeShape tube = make_tube(scene);
  for (Eigen::Index v = 0; v < h; ++v)
    for (Eigen::Index u = 0; u < w; ++u) {
      const Vec3 ray = rays.at(v, u);
      Hit hit;
      switch (scene.kind) {
        case SceneKind::plane: hit = intersect_plane(scene, ray, u, v); break;
        case SceneKind::sphere: hit = intersect_sphere(scene, ray, u, v); break;
        case SceneKind::tube: {
          hit.t = tube.exit_distance(ray, u, v);
          hit.normal = tube.normal_at(ray, hit.t, u, v);
          break;
        }
      }
      Vec3 n = hit.normal.normalized();
      if (n.dot(ray) > 0) n = -n;  // camera-facing
      bundle.depth(v, u) = hit.t;
      bundle.normals.set(v, u, n);
      const AlbedoHS hs = texture_at(scene.texture, hit.t * ray);
      bundle.albedo.ch[0](v, u) = hs.h;
      bundle.albedo.ch[1](v, u) = hs.s;
    }

  bundle.image = render_image(scene.light, rays, bundle.depth, bundle.albedo,
                              bundle.normals);
  return bundle;
}

ScalarField perturb_depth(const ScalarField& depth, Real amplitude,
                          Real smoothness, std::uint64_t seed) {
  if (!(amplitude >= 0))
    throw DomainError(fmt::format("perturb_depth: amplitude must be >= 0, got {}",
                                  amplitude));
  if (amplitude == 0) return depth;
  const Eigen::Index h = depth.rows(), w = depth.cols();

  // mt19937_64 output is pinned by the standard, so the field is bitwise
  // reproducible; the distribution is built by hand for the same reason.
  std::mt19937_64 rng(seed);
  ScalarField noise(h, w);
  for (Eigen::Index v = 0; v < h; ++v)
    for (Eigen::Index u = 0; u < w; ++u)
      noise(v, u) = 2 * (static_cast<Real>(rng() >> 11) * 0x1.0p-53) - 1;

  const int radius = std::max(0, static_cast<int>(std::lround(smoothness)));
  for (int pass = 0; pass < 2 && radius > 0; ++pass) {
    ScalarField tmp(h, w);
    for (Eigen::Index v = 0; v < h; ++v)  // horizontal box blur
      for (Eigen::Index u = 0; u < w; ++u) {
        Real sum = 0;
        int count = 0;
        for (Eigen::Index k = std::max<Eigen::Index>(0, u - radius);
             k <= std::min<Eigen::Index>(w - 1, u + radius); ++k, ++count)
          sum += noise(v, k);
        tmp(v, u) = sum / count;
      }
    for (Eigen::Index v = 0; v < h; ++v)  // vertical box blur
      for (Eigen::Index u = 0; u < w; ++u) {
        Real sum = 0;
        int count = 0;
        for (Eigen::Index k = std::max<Eigen::Index>(0, v - radius);
             k <= std::min<Eigen::Index>(h - 1, v + radius); ++k, ++count)
          sum += tmp(k, u);
        noise(v, u) = sum / count;
      }
  }

  noise -= noise.mean();
  const Real peak = noise.abs().maxCoeff();
  if (peak > 0) noise /= peak;
  return depth * (1 + amplitude * noise);
}

}  // namespace lume
