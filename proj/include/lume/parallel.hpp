/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <Eigen/Core>

#include <functional>

namespace lume {

/// Process-wide worker cap for row-parallel loops. Defaults to 1.
void set_thread_count(int n);
int thread_count();

/// Runs fn(v_begin, v_end) over disjoint row ranges covering [0, rows).
/// With thread_count() == 1 this is a plain call; otherwise rows are split
/// into contiguous blocks, one per worker. Callers that reduce must keep
/// per-row partials and combine them in row order afterwards, so results
/// are identical for every thread count.
void parallel_rows(Eigen::Index rows,
                   const std::function<void(Eigen::Index, Eigen::Index)>& fn);

}  // namespace lume
