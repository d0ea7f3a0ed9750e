#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "segred/feature_matrix.hpp"
#include "segred/reduce_op.hpp"
#include "segred/schedule.hpp"
#include "segred/segmented_index.hpp"

namespace segred {

/// How thread groups publish partial results into Y.
enum class CommitMode {
  /// Each group buffers its commits; buffers are folded into Y serially in
  /// group order. Output is bitwise stable for any worker count.
  Deterministic,
  /// Commits go straight into Y through compare-and-swap atomics.
  Atomic,
};

/// Instrumentation filled in by the kernels when requested.
struct KernelStats {
  std::uint64_t total_commits = 0;
  /// Commits per thread group, indexed by group number.
  std::vector<std::uint32_t> group_commits;
};

/// Picks a configuration when the caller does not pass one.
using ConfigSelector = std::function<KernelConfig(const SegmentedIndex& idx, std::int64_t feature_size)>;

struct ExecOptions {
  int workers = 0;  ///< <= 0: available parallelism
  CommitMode commit = CommitMode::Deterministic;
  /// Report Max over an empty segment as 0 instead of -inf.
  bool empty_as_zero = true;
  KernelStats* stats = nullptr;
  /// Consulted by the high-level entry points when no config is given.
  /// Falls back to hand_rule_config when empty.
  ConfigSelector selector;
};

/// Throws std::invalid_argument if the config cannot drive the given schedule.
void require_runnable(const KernelConfig& cfg, Schedule expected);

/// Sequential-reduction kernel. Y must be identity-initialized with
/// idx.out_rows() rows and x.cols() columns.
template <typename T>
void run_sr_kernel(const SegmentedIndex& idx, const FeatureMatrix<T>& x, FeatureMatrix<T>& y,
                   ReduceOp op, const KernelConfig& cfg, const ExecOptions& opts = {});

/// Parallel-reduction kernel over emulated lane groups. Same contract as
/// run_sr_kernel.
template <typename T>
void run_pr_kernel(const SegmentedIndex& idx, const FeatureMatrix<T>& x, FeatureMatrix<T>& y,
                   ReduceOp op, const KernelConfig& cfg, const ExecOptions& opts = {});

/// Dispatches on cfg.schedule. Row m of the reduction input is
/// x[src[m]] (scaled by weight[m] when weights are given); an empty src
/// means row m of x itself.
template <typename T>
void run_kernel(const SegmentedIndex& idx, const FeatureMatrix<T>& x, std::span<const index_t> src,
                std::span<const T> weights, FeatureMatrix<T>& y, ReduceOp op,
                const KernelConfig& cfg, const ExecOptions& opts = {});

extern template void run_sr_kernel<float>(const SegmentedIndex&, const FeatureMatrix<float>&,
                                          FeatureMatrix<float>&, ReduceOp, const KernelConfig&,
                                          const ExecOptions&);
extern template void run_sr_kernel<double>(const SegmentedIndex&, const FeatureMatrix<double>&,
                                           FeatureMatrix<double>&, ReduceOp, const KernelConfig&,
                                           const ExecOptions&);
extern template void run_pr_kernel<float>(const SegmentedIndex&, const FeatureMatrix<float>&,
                                          FeatureMatrix<float>&, ReduceOp, const KernelConfig&,
                                          const ExecOptions&);
extern template void run_pr_kernel<double>(const SegmentedIndex&, const FeatureMatrix<double>&,
                                           FeatureMatrix<double>&, ReduceOp, const KernelConfig&,
                                           const ExecOptions&);
extern template void run_kernel<float>(const SegmentedIndex&, const FeatureMatrix<float>&,
                                       std::span<const index_t>, std::span<const float>,
                                       FeatureMatrix<float>&, ReduceOp, const KernelConfig&,
                                       const ExecOptions&);
extern template void run_kernel<double>(const SegmentedIndex&, const FeatureMatrix<double>&,
                                        std::span<const index_t>, std::span<const double>,
                                        FeatureMatrix<double>&, ReduceOp, const KernelConfig&,
                                        const ExecOptions&);

}  // namespace segred
