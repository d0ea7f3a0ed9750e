#pragma once

#include <optional>
#include <span>

#include "segred/feature_matrix.hpp"
#include "segred/kernels.hpp"
#include "segred/reduce_op.hpp"
#include "segred/schedule.hpp"
#include "segred/segmented_index.hpp"

namespace segred {

/// Serial reference: folds x rows into Y in ascending m. Empty rows hold 0
/// for Sum/Mean and -inf for Max.
template <typename T>
FeatureMatrix<T> segment_reduce_oracle(const SegmentedIndex& idx, const FeatureMatrix<T>& x,
                                       ReduceOp op);

/// Y[i] = op over {x[m] : idx[m] = i}, computed by the tiled kernels.
/// Without cfg, opts.selector (or the hand rule) picks one.
template <typename T>
FeatureMatrix<T> segment_reduce(const SegmentedIndex& idx, const FeatureMatrix<T>& x, ReduceOp op,
                                std::optional<KernelConfig> cfg = std::nullopt,
                                const ExecOptions& opts = {});

/// Fused gather + segment reduction: row m of the input is x[src[m]].
template <typename T>
FeatureMatrix<T> index_segment_reduce(std::span<const index_t> src, const SegmentedIndex& dst,
                                      const FeatureMatrix<T>& x, ReduceOp op,
                                      std::optional<KernelConfig> cfg = std::nullopt,
                                      const ExecOptions& opts = {});

/// Sorted-COO SpMM: Y[dst[m]] += w[m] * x[src[m]]. Only Sum is accepted.
template <typename T>
FeatureMatrix<T> index_weight_segment_reduce(std::span<const index_t> src,
                                             const SegmentedIndex& dst, std::span<const T> w,
                                             const FeatureMatrix<T>& x,
                                             std::optional<KernelConfig> cfg = std::nullopt,
                                             const ExecOptions& opts = {},
                                             ReduceOp op = ReduceOp::sum());

/// out[m] = x[src[m]].
template <typename T>
FeatureMatrix<T> gather(std::span<const index_t> src, const FeatureMatrix<T>& x);

#define SEGRED_EXTERN_REDUCE(T)                                                                   \
  extern template FeatureMatrix<T> segment_reduce_oracle<T>(const SegmentedIndex&,               \
                                                            const FeatureMatrix<T>&, ReduceOp);  \
  extern template FeatureMatrix<T> segment_reduce<T>(const SegmentedIndex&,                      \
                                                     const FeatureMatrix<T>&, ReduceOp,          \
                                                     std::optional<KernelConfig>,                \
                                                     const ExecOptions&);                        \
  extern template FeatureMatrix<T> index_segment_reduce<T>(                                      \
      std::span<const index_t>, const SegmentedIndex&, const FeatureMatrix<T>&, ReduceOp,        \
      std::optional<KernelConfig>, const ExecOptions&);                                          \
  extern template FeatureMatrix<T> index_weight_segment_reduce<T>(                               \
      std::span<const index_t>, const SegmentedIndex&, std::span<const T>,                       \
      const FeatureMatrix<T>&, std::optional<KernelConfig>, const ExecOptions&, ReduceOp);       \
  extern template FeatureMatrix<T> gather<T>(std::span<const index_t>, const FeatureMatrix<T>&);

SEGRED_EXTERN_REDUCE(float)
SEGRED_EXTERN_REDUCE(double)
#undef SEGRED_EXTERN_REDUCE

}  // namespace segred
