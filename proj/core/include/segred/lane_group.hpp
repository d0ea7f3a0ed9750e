#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>

#include "segred/types.hpp"

namespace segred {

inline constexpr int kMaxLanes = 32;

/// One register per lane. Only the first LaneGroup::size() entries are live.
template <typename V>
using LaneRegister = std::array<V, kMaxLanes>;

/// Bit r set <=> lane r.
using LaneMask = std::uint32_t;

/// CPU emulation of a cooperative thread group of G_t lanes executing in
/// lockstep. A shuffle reads every source lane before any lane writes, so
/// the result matches hardware shuffles regardless of evaluation order.
///
/// Out-of-range shuffles leave the lane's own value in place and are
/// reported invalid through the *_valid predicates; callers must not consume
/// such values.
class LaneGroup {
 public:
  explicit LaneGroup(int size) : size_(size) {
    if (size < 1 || size > kMaxLanes) {
      throw std::invalid_argument("LaneGroup: size must be in [1, 32]");
    }
  }

  int size() const noexcept { return size_; }

  /// Lane r receives lane (r + k)'s value.
  template <typename V>
  LaneRegister<V> shuffle_down(const LaneRegister<V>& reg, int k) const noexcept {
    LaneRegister<V> out = reg;
    for (int r = 0; r + k < size_; ++r) out[r] = reg[r + k];
    return out;
  }

  /// Lane r receives lane (r - k)'s value.
  template <typename V>
  LaneRegister<V> shuffle_up(const LaneRegister<V>& reg, int k) const noexcept {
    LaneRegister<V> out = reg;
    for (int r = size_ - 1; r - k >= 0; --r) out[r] = reg[r - k];
    return out;
  }

  bool shuffle_down_valid(int rank, int k) const noexcept { return rank + k < size_; }
  bool shuffle_up_valid(int rank, int k) const noexcept { return rank - k >= 0; }

  LaneMask all_lanes() const noexcept {
    return size_ == 32 ? ~LaneMask{0} : ((LaneMask{1} << size_) - 1);
  }

 private:
  int size_;
};

/// Segment-head flags: lane r is a head when its key differs from lane
/// r - 1's key, or r == 0.
inline LaneMask segment_heads(const LaneGroup& group, const LaneRegister<index_t>& keys) {
  const auto prev = group.shuffle_up(keys, 1);
  LaneMask heads = 0;
  for (int r = 0; r < group.size(); ++r) {
    if (r == 0 || prev[r] != keys[r]) heads |= LaneMask{1} << r;
  }
  return heads;
}

/// Key-match decisions of the doubling shuffle-down loop. Keys do not
/// change across the N-loop, so the key shuffles are evaluated once per
/// sub-iteration and replayed for every column.
struct SegmentedShufflePlan {
  int steps = 0;
  /// accept[s]: lanes r whose key equals lane (r + 2^s)'s key with r < G_t - 2^s.
  std::array<LaneMask, 5> accept{};
};

inline SegmentedShufflePlan plan_segmented_shuffle(const LaneGroup& group,
                                                   const LaneRegister<index_t>& keys) {
  SegmentedShufflePlan plan;
  const int g = group.size();
  for (int k = 1; k < g; k <<= 1, ++plan.steps) {
    const auto shifted_keys = group.shuffle_down(keys, k);
    LaneMask accept = 0;
    for (int r = 0; r < g; ++r) {
      if (shifted_keys[r] == keys[r] && r < g - k) accept |= LaneMask{1} << r;
    }
    plan.accept[static_cast<std::size_t>(plan.steps)] = accept;
  }
  return plan;
}

/// Bit r set <=> lane r and lane r + 1 hold the same key (r + 1 < G_t).
inline LaneMask adjacent_equal(const LaneGroup& group, const LaneRegister<index_t>& keys) {
  LaneMask eq = 0;
  for (int r = 0; r + 1 < group.size(); ++r) {
    if (keys[r] == keys[r + 1]) eq |= LaneMask{1} << r;
  }
  return eq;
}

/// plan_segmented_shuffle for keys whose equal values are contiguous (a
/// sorted run, possibly followed by masked lanes). Lanes r and r + 2k agree
/// iff r..r+k and r+k..r+2k both do, so each step's mask is the previous one
/// ANDed with itself shifted by k.
inline SegmentedShufflePlan plan_segmented_shuffle_runs(const LaneGroup& group, LaneMask adjacent) {
  SegmentedShufflePlan plan;
  LaneMask accept = adjacent;
  for (int k = 1; k < group.size(); k <<= 1, ++plan.steps) {
    plan.accept[static_cast<std::size_t>(plan.steps)] = accept;
    accept &= accept >> k;
  }
  return plan;
}

/// segment_heads from adjacent-equality bits.
inline LaneMask segment_heads_runs(const LaneGroup& group, LaneMask adjacent) {
  return (~(adjacent << 1)) & group.all_lanes();
}

/// Replays a plan on one value register. Equivalent to shuffle_down plus a
/// masked combine per step; done in place by ascending lane, which reads
/// lane r + k before that lane is overwritten in the same step.
template <typename T, typename Combine>
void apply_segmented_shuffle(const LaneGroup& group, const SegmentedShufflePlan& plan,
                             LaneRegister<T>& values, Combine combine) {
  (void)group;
  int k = 1;
  for (int s = 0; s < plan.steps; ++s, k <<= 1) {
    LaneMask accept = plan.accept[static_cast<std::size_t>(s)];
    while (accept != 0) {
      const int r = std::countr_zero(accept);
      accept &= accept - 1;
      values[r] = combine(values[r], values[r + k]);
    }
  }
}

/// Doubling shuffle-down with key-match masking. For sorted keys, afterwards
/// each lane holds the fold of its own value with every later lane of the
/// same key; in particular each segment head holds its whole run.
template <typename T, typename Combine>
void segmented_shuffle_reduce(const LaneGroup& group, const LaneRegister<index_t>& keys,
                              LaneRegister<T>& values, Combine combine) {
  apply_segmented_shuffle(group, plan_segmented_shuffle(group, keys), values, combine);
}

}  // namespace segred
