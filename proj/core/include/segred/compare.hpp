#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>

#include "segred/feature_matrix.hpp"

namespace segred {

/// Per-element relative tolerance used when comparing kernels against the
/// serial oracle: 1e-5 for f32, 1e-12 for f64.
template <typename T>
constexpr double default_rel_tolerance() {
  return std::is_same_v<T, float> ? 1e-5 : 1e-12;
}

template <typename T>
bool close_enough(T expected, T actual, double rel_tol) {
  if (expected == actual) return true;
  if (std::isnan(expected) || std::isnan(actual) || std::isinf(expected) || std::isinf(actual)) {
    return false;
  }
  const double e = expected;
  const double a = actual;
  const double scale = std::max(std::abs(e), std::abs(a));
  return std::abs(a - e) <= rel_tol * scale + std::numeric_limits<T>::denorm_min();
}

template <typename T>
struct Mismatch {
  std::size_t row = 0;
  std::size_t col = 0;
  T expected{};
  T actual{};

  std::string describe() const {
    return "(" + std::to_string(row) + ", " + std::to_string(col) + "): expected " +
           std::to_string(expected) + ", got " + std::to_string(actual);
  }
};

/// First element outside tolerance; shape mismatch reports (rows, cols).
template <typename T>
std::optional<Mismatch<T>> first_mismatch(const FeatureMatrix<T>& expected,
                                          const FeatureMatrix<T>& actual, double rel_tol) {
  if (expected.rows() != actual.rows() || expected.cols() != actual.cols()) {
    return Mismatch<T>{actual.rows(), actual.cols(), T{}, T{}};
  }
  for (std::size_t r = 0; r < expected.rows(); ++r) {
    for (std::size_t c = 0; c < expected.cols(); ++c) {
      if (!close_enough(expected(r, c), actual(r, c), rel_tol)) {
        return Mismatch<T>{r, c, expected(r, c), actual(r, c)};
      }
    }
  }
  return std::nullopt;
}

}  // namespace segred
