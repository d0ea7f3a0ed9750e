#include "segred/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "segred/compare.hpp"
#include "segred/segment_reduce.hpp"

namespace segred {

NanoClock steady_nano_clock() {
  return [] {
    return static_cast<std::int64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                         std::chrono::steady_clock::now().time_since_epoch())
                                         .count());
  };
}

double gflops_from(std::int64_t idx_size, std::int64_t feature_size, std::int64_t time_ns) {
  if (time_ns <= 0) throw std::invalid_argument("gflops_from: time must be positive");
  const double flops = static_cast<double>(idx_size) * static_cast<double>(feature_size);
  return flops / (static_cast<double>(time_ns) * 1e-9) / 1e9;
}

template <typename T>
std::vector<PerfRecord> benchmark_interleaved(const SegmentedIndex& idx, const FeatureMatrix<T>& x, ReduceOp op,
                                              const std::vector<KernelConfig>& configs, const BenchOptions& opts,
                                              std::vector<TimingSummary>* summaries) {
  if (opts.reps < 3) throw std::invalid_argument("benchmark_kernel: reps must be >= 3");
  const auto& candidates = opts.candidates ? *opts.candidates : CandidateSets::defaults();
  for (const auto& cfg : configs) {
    if (auto v = validate_config(cfg, candidates); !v.empty()) {
      throw std::invalid_argument("benchmark_kernel: config " + format_config(cfg) + " rejected: " + v.front());
    }
  }
  if (idx.empty()) throw std::invalid_argument("benchmark_kernel: empty index");
  if (configs.empty()) return {};

  ExecOptions exec;
  exec.workers = opts.workers;
  exec.commit = opts.commit;
  exec.empty_as_zero = false;
  const NanoClock clock = opts.clock ? opts.clock : steady_nano_clock();
  const FeatureMatrix<T> expected = segment_reduce_oracle(idx, x, op);

  // Warm-up doubles as the correctness gate and calibrates the batch size.
  const std::size_t n_cfg = configs.size();
  std::vector<std::int64_t> batch(n_cfg, 1);
  for (std::size_t i = 0; i < n_cfg; ++i) {
    const std::int64_t w0 = clock();
    const FeatureMatrix<T> warm = segment_reduce(idx, x, op, configs[i], exec);
    const std::int64_t warm_ns = std::max<std::int64_t>(1, clock() - w0);
    if (auto bad = first_mismatch(expected, warm, default_rel_tolerance<T>())) {
      throw OracleMismatch("benchmark_kernel: " + format_config(configs[i]) + " disagrees with oracle at " +
                           bad->describe());
    }
    if (opts.min_sample_ns > 0) batch[i] = std::clamp<std::int64_t>(opts.min_sample_ns / warm_ns + 1, 1, 1'000'000);
  }

  std::vector<std::vector<std::int64_t>> samples(n_cfg);
  for (int r = 0; r < opts.reps; ++r) {
    const std::size_t start = static_cast<std::size_t>(r) * n_cfg / static_cast<std::size_t>(opts.reps);
    for (std::size_t j = 0; j < n_cfg; ++j) {
      const std::size_t i = (start + j) % n_cfg;
      const std::int64_t t0 = clock();
      for (std::int64_t k = 0; k < batch[i]; ++k) {
        const FeatureMatrix<T> y = segment_reduce(idx, x, op, configs[i], exec);
      }
      const std::int64_t t1 = clock();
      samples[i].push_back(std::max<std::int64_t>(1, (t1 - t0) / batch[i]));
    }
  }

  const FeatureVector features = extract_features(idx, static_cast<std::int64_t>(x.cols()));
  std::vector<PerfRecord> out;
  out.reserve(n_cfg);
  if (summaries) summaries->assign(n_cfg, TimingSummary{});
  for (std::size_t i = 0; i < n_cfg; ++i) {
    std::vector<std::int64_t> sorted = samples[i];
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const std::int64_t median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
    if (summaries) {
      double mean = 0.0;
      for (auto v : samples[i]) mean += static_cast<double>(v);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (auto v : samples[i]) var += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
      var /= static_cast<double>(n);
      (*summaries)[i] = TimingSummary{median, mean, mean > 0 ? std::sqrt(var) / mean : 0.0};
    }
    PerfRecord rec;
    rec.dataset_id = opts.dataset_id;
    rec.features = features;
    rec.config = configs[i];
    rec.reps = opts.reps;
    rec.time_ns = median;
    rec.gflops = gflops_from(features.idx_size, features.feature_size, median);
    out.push_back(std::move(rec));
  }
  return out;
}

template <typename T>
PerfRecord benchmark_kernel(const SegmentedIndex& idx, const FeatureMatrix<T>& x, ReduceOp op,
                            const KernelConfig& cfg, const BenchOptions& opts,
                            TimingSummary* summary) {
  std::vector<TimingSummary> summaries;
  auto recs = benchmark_interleaved(idx, x, op, {cfg}, opts, summary ? &summaries : nullptr);
  if (summary) *summary = summaries.front();
  return std::move(recs.front());
}

template <typename T>
FeatureMatrix<T> random_features(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  FeatureMatrix<T> x(rows, cols);
  for (auto& v : x.data()) v = static_cast<T>(dist(rng));
  return x;
}

template PerfRecord benchmark_kernel<float>(const SegmentedIndex&, const FeatureMatrix<float>&,
                                            ReduceOp, const KernelConfig&, const BenchOptions&,
                                            TimingSummary*);
template PerfRecord benchmark_kernel<double>(const SegmentedIndex&, const FeatureMatrix<double>&,
                                             ReduceOp, const KernelConfig&, const BenchOptions&,
                                             TimingSummary*);
template std::vector<PerfRecord> benchmark_interleaved<float>(const SegmentedIndex&, const FeatureMatrix<float>&,
                                                              ReduceOp, const std::vector<KernelConfig>&,
                                                              const BenchOptions&, std::vector<TimingSummary>*);
template std::vector<PerfRecord> benchmark_interleaved<double>(const SegmentedIndex&, const FeatureMatrix<double>&,
                                                               ReduceOp, const std::vector<KernelConfig>&,
                                                               const BenchOptions&, std::vector<TimingSummary>*);
template FeatureMatrix<float> random_features<float>(std::size_t, std::size_t, std::uint64_t);
template FeatureMatrix<double> random_features<double>(std::size_t, std::size_t, std::uint64_t);

}  // namespace segred
