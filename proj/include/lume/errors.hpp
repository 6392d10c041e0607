/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace lume {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Precondition violated by a value (bad coordinate, non-positive depth...).
struct DomainError : Error {
  using Error::Error;
};

/// Mismatched grid resolutions.
struct ShapeError : Error {
  using Error::Error;
};

/// Non-finite values or a diverging optimization.
struct NumericError : Error {
  using Error::Error;
};

/// File format or filesystem failure.
struct IoError : Error {
  using Error::Error;
};

/// "WxH" with the conventional width-first order.
inline std::string shape_str(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(cols) + "x" + std::to_string(rows);
}

inline void require_same_shape(const char* context, Eigen::Index a_rows,
                               Eigen::Index a_cols, Eigen::Index b_rows,
                               Eigen::Index b_cols) {
  if (a_rows != b_rows || a_cols != b_cols) {
    throw ShapeError(std::string(context) + ": field shapes differ: " +
                     shape_str(a_rows, a_cols) + " vs " +
                     shape_str(b_rows, b_cols));
  }
}

template <typename A, typename B>
void require_same_shape(const char* context, const A& a, const B& b) {
  require_same_shape(context, a.rows(), a.cols(), b.rows(), b.cols());
}

}  // namespace lume
