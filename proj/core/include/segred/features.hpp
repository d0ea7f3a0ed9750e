#pragma once

#include <cstdint>
#include <stdexcept>

#include "segred/segmented_index.hpp"

namespace segred {

/// O(1) summary of a reduction problem used by the config rules.
struct FeatureVector {
  std::int64_t idx_size = 0;  ///< M, the index length
  std::int64_t idx_max = 0;   ///< last index value + 1
  double avg = 0.0;           ///< idx_size / idx_max
  std::int64_t feature_size = 0;  ///< F, the width of X

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Builds a FeatureVector from any sorted index that exposes size() and
/// operator[]. Reads the length and the final element only.
template <typename SortedIndex>
FeatureVector extract_features(const SortedIndex& idx, std::int64_t feature_size) {
  const auto n = static_cast<std::int64_t>(idx.size());
  if (n == 0) throw std::invalid_argument("extract_features: empty index");
  if (feature_size < 1) throw std::invalid_argument("extract_features: feature size must be >= 1");
  FeatureVector fv;
  fv.idx_size = n;
  fv.idx_max = static_cast<std::int64_t>(idx[static_cast<std::size_t>(n - 1)]) + 1;
  fv.avg = static_cast<double>(fv.idx_size) / static_cast<double>(fv.idx_max);
  fv.feature_size = feature_size;
  return fv;
}

extern template FeatureVector extract_features<SegmentedIndex>(const SegmentedIndex&, std::int64_t);

}  // namespace segred
