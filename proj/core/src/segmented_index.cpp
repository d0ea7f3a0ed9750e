#include "segred/segmented_index.hpp"

#include <stdexcept>
#include <string>

namespace segred {

SegmentedIndex::SegmentedIndex(std::vector<index_t> values, index_t out_rows)
    : values_(std::move(values)), out_rows_(out_rows) {
  if (out_rows_ < 1) throw std::invalid_argument("SegmentedIndex: out_rows must be positive");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < 0) {
      throw std::invalid_argument("SegmentedIndex: negative value at position " +
                                  std::to_string(i));
    }
    if (i > 0 && values_[i] < values_[i - 1]) {
      throw std::invalid_argument("SegmentedIndex: values not sorted at position " +
                                  std::to_string(i));
    }
  }
  if (!values_.empty() && values_.back() >= out_rows_) {
    throw std::invalid_argument("SegmentedIndex: value " + std::to_string(values_.back()) +
                                " >= out_rows " + std::to_string(out_rows_));
  }
}

SegmentedIndex::SegmentedIndex(std::vector<index_t> values)
    : SegmentedIndex(values, values.empty() ? 0 : values.back() + 1) {}

std::vector<index_t> SegmentedIndex::segment_counts() const {
  std::vector<index_t> counts(static_cast<std::size_t>(out_rows_), 0);
  for (index_t v : values_) ++counts[static_cast<std::size_t>(v)];
  return counts;
}

std::size_t SegmentedIndex::num_segments() const noexcept {
  std::size_t n = values_.empty() ? 0 : 1;
  for (std::size_t i = 1; i < values_.size(); ++i) n += values_[i] != values_[i - 1];
  return n;
}

}  // namespace segred
