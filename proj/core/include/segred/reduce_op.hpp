#pragma once

#include <algorithm>
#include <limits>
#include <string_view>

namespace segred {

enum class ReduceKind { Sum, Mean, Max };

/// Reduction functor. Mean folds like Sum; the division by segment counts
/// happens after the kernels run.
class ReduceOp {
 public:
  constexpr ReduceOp() = default;
  constexpr explicit ReduceOp(ReduceKind kind) : kind_(kind) {}

  static constexpr ReduceOp sum() { return ReduceOp(ReduceKind::Sum); }
  static constexpr ReduceOp mean() { return ReduceOp(ReduceKind::Mean); }
  static constexpr ReduceOp max() { return ReduceOp(ReduceKind::Max); }

  constexpr ReduceKind kind() const noexcept { return kind_; }
  constexpr bool is_max() const noexcept { return kind_ == ReduceKind::Max; }

  template <typename T>
  constexpr T identity() const noexcept {
    return is_max() ? -std::numeric_limits<T>::infinity() : T(0);
  }

  template <typename T>
  constexpr T combine(T a, T b) const noexcept {
    return is_max() ? std::max(a, b) : a + b;
  }

  friend constexpr bool operator==(ReduceOp, ReduceOp) = default;

 private:
  ReduceKind kind_ = ReduceKind::Sum;
};

std::string_view to_string(ReduceOp op) noexcept;

/// Accepts "sum", "mean", "max". Throws std::invalid_argument otherwise.
ReduceOp parse_reduce_op(std::string_view text);

}  // namespace segred
