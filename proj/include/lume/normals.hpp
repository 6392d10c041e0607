/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "lume/types.hpp"

namespace lume {

/// Unit, camera-facing (n . -ray > 0) per-pixel surface normals.
using NormalMap = VectorField;

/// Normals from the six-neighborhood (N, NE, E, S, SW, W): back-project the
/// center and its six neighbors, form the fan of triangles (center, k, k+1)
/// in that cyclic order, orient each triangle normal toward the camera and
/// average weighted by triangle area. Border pixels copy the nearest
/// interior normal; a pixel whose six triangles are all degenerate falls
/// back to -ray.
NormalMap normals_six_neighbor(const ScalarField& depth,
                               const VectorField& rays);

/// Central-difference baseline: normal = oriented cross product of the u-
/// and v-tangents of the back-projected surface. Same border and
/// degeneracy policy as normals_six_neighbor.
NormalMap normals_cross_baseline(const ScalarField& depth,
                                 const VectorField& rays);

/// Pullback of normals_six_neighbor: accumulates dL/d(depth) into
/// grad_depth (pre-sized, added to) given dL/d(normal map). Border-pixel
/// gradients are routed to the interior pixel they replicate; degenerate
/// fallbacks contribute nothing.
void normals_six_neighbor_backward(const ScalarField& depth,
                                   const VectorField& rays,
                                   const VectorField& grad_normals,
                                   ScalarField& grad_depth);

}  // namespace lume
