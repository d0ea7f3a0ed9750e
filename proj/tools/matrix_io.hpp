#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "segred/feature_matrix.hpp"
#include "segred/types.hpp"

namespace segred::cli {

/// Binary dense matrix file, little-endian:
///   magic "SEGREDY\0" (8 bytes), u32 format version (1), u32 element kind
///   (0 = f32, 1 = f64), i64 rows, i64 cols, u64 seed, then rows*cols
///   elements in row-major order.
struct MatrixFile {
  std::uint64_t seed = 0;
  std::variant<FeatureMatrix<float>, FeatureMatrix<double>> data;

  ElementKind kind() const noexcept {
    return data.index() == 0 ? ElementKind::F32 : ElementKind::F64;
  }
};

template <typename T>
void save_matrix(const FeatureMatrix<T>& m, std::uint64_t seed, const std::string& path);
MatrixFile load_matrix(const std::string& path);

/// Tab-separated text rendering, one row per line, shortest round-trip digits.
template <typename T>
std::string format_matrix_text(const FeatureMatrix<T>& m);

}  // namespace segred::cli
