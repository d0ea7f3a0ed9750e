#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "segred/feature_matrix.hpp"
#include "segred/kernels.hpp"
#include "segred/perfdb.hpp"
#include "segred/reduce_op.hpp"
#include "segred/segmented_index.hpp"

namespace segred {

/// Monotonic clock in nanoseconds. Tests inject fakes.
using NanoClock = std::function<std::int64_t()>;
NanoClock steady_nano_clock();

/// One combine per input element: (idx_size * F) / seconds / 1e9.
double gflops_from(std::int64_t idx_size, std::int64_t feature_size, std::int64_t time_ns);

struct TimingSummary {
  std::int64_t median_ns = 0;
  double mean_ns = 0.0;
  double cv = 0.0;  ///< coefficient of variation over the timed reps
};

struct BenchOptions {
  int reps = 3;
  int workers = 0;
  CommitMode commit = CommitMode::Deterministic;
  std::string dataset_id;
  NanoClock clock;  ///< empty: steady clock
  /// Each timed sample repeats the kernel until it spans at least this long
  /// (calibrated from the warm-up); the recorded time is per execution.
  /// 0 times single executions.
  std::int64_t min_sample_ns = 300'000;
  /// Reject candidates outside these sets before timing.
  const CandidateSets* candidates = nullptr;
};

/// Result verification failure; the timing is discarded.
class OracleMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Validates cfg, runs one warm-up that is checked against the oracle, then
/// takes `reps` timed samples and records the median per-execution time.
template <typename T>
PerfRecord benchmark_kernel(const SegmentedIndex& idx, const FeatureMatrix<T>& x, ReduceOp op,
                            const KernelConfig& cfg, const BenchOptions& opts,
                            TimingSummary* summary = nullptr);

/// Same protocol for several configs at once, interleaved: every round takes
/// one sample of each config (starting point rotated per round), so slow
/// drift in machine speed spreads evenly instead of landing on whichever
/// config happened to be timed during it. Records come back in input order.
template <typename T>
std::vector<PerfRecord> benchmark_interleaved(const SegmentedIndex& idx, const FeatureMatrix<T>& x, ReduceOp op,
                                              const std::vector<KernelConfig>& configs, const BenchOptions& opts,
                                              std::vector<TimingSummary>* summaries = nullptr);

extern template PerfRecord benchmark_kernel<float>(const SegmentedIndex&, const FeatureMatrix<float>&,
                                                   ReduceOp, const KernelConfig&, const BenchOptions&,
                                                   TimingSummary*);
extern template PerfRecord benchmark_kernel<double>(const SegmentedIndex&, const FeatureMatrix<double>&,
                                                    ReduceOp, const KernelConfig&, const BenchOptions&,
                                                    TimingSummary*);

extern template std::vector<PerfRecord> benchmark_interleaved<float>(
    const SegmentedIndex&, const FeatureMatrix<float>&, ReduceOp, const std::vector<KernelConfig>&,
    const BenchOptions&, std::vector<TimingSummary>*);
extern template std::vector<PerfRecord> benchmark_interleaved<double>(
    const SegmentedIndex&, const FeatureMatrix<double>&, ReduceOp, const std::vector<KernelConfig>&,
    const BenchOptions&, std::vector<TimingSummary>*);

/// Deterministic uniform [0.5, 1.5) feature matrix.
template <typename T>
FeatureMatrix<T> random_features(std::size_t rows, std::size_t cols, std::uint64_t seed);

extern template FeatureMatrix<float> random_features<float>(std::size_t, std::size_t, std::uint64_t);
extern template FeatureMatrix<double> random_features<double>(std::size_t, std::size_t, std::uint64_t);

}  // namespace segred
