/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "lume/normals.hpp"

#include <fmt/core.h>

#include <cmath>

#include "lume/errors.hpp"
#include "lume/parallel.hpp"

namespace lume {

namespace {

// Six-neighborhood in cyclic order N, NE, E, S, SW, W as (dv, du).
constexpr int kDv[6] = {-1, -1, 0, 1, 1, 0};
constexpr int kDu[6] = {0, 1, 1, 0, -1, -1};

// Squared-norm floor below which a normal sum counts as degenerate.
constexpr Real kDegenerate2 = 1e-60;

void check_depth(const ScalarField& depth, const VectorField& rays) {
  require_same_shape("normals: depth vs rays", depth, rays);
  if (depth.rows() < 3 || depth.cols() < 3)
    throw DomainError(fmt::format("normals: need at least 3x3 pixels, got {}",
                                  shape_str(depth.rows(), depth.cols())));
  for (Eigen::Index v = 0; v < depth.rows(); ++v)
    for (Eigen::Index u = 0; u < depth.cols(); ++u)
      if (!(depth(v, u) > 0))
        throw DomainError(fmt::format(
            "normals: depth must be positive at pixel ({}, {}), got {}", u, v,
            depth(v, u)));
}

// Unnormalized area-weighted normal sum over the six-triangle fan; each
// cross product is flipped toward the camera (against the center ray)
// before summing, so degenerate triangles drop out with zero weight.
Vec3 fan_normal_sum(const ScalarField& depth, const VectorField& rays,
                    Eigen::Index v, Eigen::Index u) {
  const Vec3 r0 = rays.at(v, u);
  const Vec3 p0 = depth(v, u) * r0;
  Vec3 p[6];
  for (int k = 0; k < 6; ++k)
    p[k] = depth(v + kDv[k], u + kDu[k]) * rays.at(v + kDv[k], u + kDu[k]);
  Vec3 m = Vec3::Zero();
  for (int k = 0; k < 6; ++k) {
    const Vec3 c = (p[k] - p0).cross(p[(k + 1) % 6] - p0);
    m += c.dot(r0) <= 0 ? c : -c;
  }
  return m;
}

void replicate_border(NormalMap& normals) {
  const Eigen::Index h = normals.rows(), w = normals.cols();
  for (Eigen::Index v = 0; v < h; ++v)
    for (Eigen::Index u = 0; u < w; ++u) {
      if (v > 0 && v < h - 1 && u > 0 && u < w - 1) continue;
      const Eigen::Index vi = std::clamp<Eigen::Index>(v, 1, h - 2);
      const Eigen::Index ui = std::clamp<Eigen::Index>(u, 1, w - 2);
      normals.set(v, u, normals.at(vi, ui));
    }
}

}  // namespace

NormalMap normals_six_neighbor(const ScalarField& depth,
                               const VectorField& rays) {
  check_depth(depth, rays);
  const Eigen::Index h = depth.rows(), w = depth.cols();
  NormalMap normals(h, w);
  parallel_rows(h - 2, [&](Eigen::Index row0, Eigen::Index row1) {
    for (Eigen::Index v = row0 + 1; v < row1 + 1; ++v)
      for (Eigen::Index u = 1; u < w - 1; ++u) {
        const Vec3 m = fan_normal_sum(depth, rays, v, u);
        normals.set(v, u, m.squaredNorm() < kDegenerate2
                              ? Vec3(-rays.at(v, u))
                              : Vec3(m.normalized()));
      }
  });
  replicate_border(normals);
  return normals;
}

NormalMap normals_cross_baseline(const ScalarField& depth,
                                 const VectorField& rays) {
  check_depth(depth, rays);
  const Eigen::Index h = depth.rows(), w = depth.cols();
  NormalMap normals(h, w);
  parallel_rows(h - 2, [&](Eigen::Index row0, Eigen::Index row1) {
    for (Eigen::Index v = row0 + 1; v < row1 + 1; ++v)
      for (Eigen::Index u = 1; u < w - 1; ++u) {
        const Vec3 r0 = rays.at(v, u);
        const Vec3 tu = depth(v, u + 1) * rays.at(v, u + 1) -
                        depth(v, u - 1) * rays.at(v, u - 1);
        const Vec3 tv = depth(v + 1, u) * rays.at(v + 1, u) -
                        depth(v - 1, u) * rays.at(v - 1, u);
        Vec3 c = tu.cross(tv);
        if (c.dot(r0) > 0) c = -c;
        normals.set(v, u, c.squaredNorm() < kDegenerate2
                              ? Vec3(-r0)
                              : Vec3(c.normalized()));
      }
  });
  replicate_border(normals);
  return normals;
}

void normals_six_neighbor_backward(const ScalarField& depth,
                                   const VectorField& rays,
                                   const VectorField& grad_normals,
                                   ScalarField& grad_depth) {
  check_depth(depth, rays);
  require_same_shape("normals backward: depth vs grad_normals", depth,
                     grad_normals);
  require_same_shape("normals backward: depth vs grad_depth", depth,
                     grad_depth);
  const Eigen::Index h = depth.rows(), w = depth.cols();

  // Border normals are copies, so their gradients flow to the source pixel.
  VectorField g = grad_normals;
  for (Eigen::Index v = 0; v < h; ++v)
    for (Eigen::Index u = 0; u < w; ++u) {
      if (v > 0 && v < h - 1 && u > 0 && u < w - 1) continue;
      const Eigen::Index vi = std::clamp<Eigen::Index>(v, 1, h - 2);
      const Eigen::Index ui = std::clamp<Eigen::Index>(u, 1, w - 2);
      g.set(vi, ui, g.at(vi, ui) + g.at(v, u));
    }

  // Scatter writes overlap between neighboring rows; keep this serial so
  // the result never depends on the thread count.
  for (Eigen::Index v = 1; v < h - 1; ++v)
    for (Eigen::Index u = 1; u < w - 1; ++u) {
      const Vec3 m = fan_normal_sum(depth, rays, v, u);
      const Real m_norm2 = m.squaredNorm();
      if (m_norm2 < kDegenerate2) continue;  // fallback normal is constant
      const Real m_norm = std::sqrt(m_norm2);
      const Vec3 n = m / m_norm;
      const Vec3 gn = g.at(v, u);
      const Vec3 m_bar = (gn - n * n.dot(gn)) / m_norm;

      const Vec3 r0 = rays.at(v, u);
      const Vec3 p0 = depth(v, u) * r0;
      Vec3 p[6];
      for (int k = 0; k < 6; ++k)
        p[k] = depth(v + kDv[k], u + kDu[k]) * rays.at(v + kDv[k], u + kDu[k]);
      Vec3 p_bar[6] = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                       Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
      Vec3 p0_bar = Vec3::Zero();
      for (int k = 0; k < 6; ++k) {
        const int j = (k + 1) % 6;
        const Vec3 a = p[k] - p0;
        const Vec3 b = p[j] - p0;
        const Vec3 c = a.cross(b);
        // The flip toward the camera is locally constant.
        const Vec3 c_bar = c.dot(r0) <= 0 ? m_bar : Vec3(-m_bar);
        const Vec3 a_bar = b.cross(c_bar);
        const Vec3 b_bar = c_bar.cross(a);
        p_bar[k] += a_bar;
        p_bar[j] += b_bar;
        p0_bar -= a_bar + b_bar;
      }
      grad_depth(v, u) += p0_bar.dot(r0);
      for (int k = 0; k < 6; ++k)
        grad_depth(v + kDv[k], u + kDu[k]) +=
            p_bar[k].dot(rays.at(v + kDv[k], u + kDu[k]));
    }
}

}  // namespace lume
