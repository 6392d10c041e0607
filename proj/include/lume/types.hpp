/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>

namespace lume {

/// Scalar used for all internal computation. File formats store 32-bit
/// floats; values are widened on read and narrowed on write.
using Real = double;

using Vec2 = Eigen::Matrix<Real, 2, 1>;
using Vec3 = Eigen::Matrix<Real, 3, 1>;

template <typename T>
using Grid = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic>;

/// height x width grid of scalars, indexed (v, u) with v the row (downward)
/// and u the column (rightward).
using ScalarField = Grid<Real>;

using MaskField = Grid<bool>;

/// N-channel grid stored as one scalar plane per channel.
template <int N>
struct VecField {
  std::array<ScalarField, N> ch;

  VecField() = default;
  VecField(Eigen::Index height, Eigen::Index width) { resize(height, width); }

  void resize(Eigen::Index height, Eigen::Index width) {
    for (auto& c : ch) c = ScalarField::Zero(height, width);
  }

  Eigen::Index rows() const { return ch[0].rows(); }
  Eigen::Index cols() const { return ch[0].cols(); }

  Eigen::Matrix<Real, N, 1> at(Eigen::Index v, Eigen::Index u) const {
    Eigen::Matrix<Real, N, 1> out;
    for (int i = 0; i < N; ++i) out[i] = ch[i](v, u);
    return out;
  }

  void set(Eigen::Index v, Eigen::Index u,
           const Eigen::Matrix<Real, N, 1>& x) {
    for (int i = 0; i < N; ++i) ch[i](v, u) = x[i];
  }
};

/// RGB image, channels in [0,1].
using ColorImage = VecField<3>;

/// Per-pixel 3-vectors (camera rays, surface normals).
using VectorField = VecField<3>;

/// Per-pixel hue/saturation pair (ch 0 = hue in [0,1), ch 1 = saturation).
using AlbedoField = VecField<2>;

}  // namespace lume
