#pragma once

#include <span>
#include <vector>

#include "segred/types.hpp"

namespace segred {

/// Non-decreasing destination-row array. Segment boundaries are key changes.
///
/// Construction validates sortedness and bounds once; afterwards every
/// accessor is O(1), including idx_max().
class SegmentedIndex {
 public:
  SegmentedIndex() = default;

  /// Throws std::invalid_argument on unsorted input or out_rows <= max value.
  SegmentedIndex(std::vector<index_t> values, index_t out_rows);

  /// out_rows = values.back() + 1. Requires non-empty values.
  explicit SegmentedIndex(std::vector<index_t> values);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  index_t operator[](std::size_t i) const noexcept { return values_[i]; }
  index_t back() const noexcept { return values_.back(); }
  std::span<const index_t> values() const noexcept { return values_; }
  const index_t* data() const noexcept { return values_.data(); }
  index_t out_rows() const noexcept { return out_rows_; }

  /// Last value + 1, or 0 for an empty index.
  index_t idx_max() const noexcept { return values_.empty() ? 0 : values_.back() + 1; }

  /// Number of entries per output row (length out_rows). O(M).
  std::vector<index_t> segment_counts() const;

  /// Number of distinct keys. O(M).
  std::size_t num_segments() const noexcept;

  friend bool operator==(const SegmentedIndex&, const SegmentedIndex&) = default;

 private:
  std::vector<index_t> values_;
  index_t out_rows_ = 1;
};

}  // namespace segred
