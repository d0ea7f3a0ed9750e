#include "segred/sweep.hpp"

#include <stdexcept>

#include "segred/synth.hpp"

namespace segred {
namespace {

std::vector<Schedule> schedules_for(std::int64_t f, const SweepOptions& opts) {
  if (opts.both_schedules) return {Schedule::SR, Schedule::PR};
  return {default_schedule(f)};
}

BenchOptions bench_options(const SweepOptions& opts) {
  BenchOptions bench;
  bench.reps = opts.reps;
  bench.workers = opts.workers;
  bench.candidates = &opts.candidates;
  bench.min_sample_ns = opts.min_sample_ns;
  return bench;
}

template <typename T>
PerfRecord measure_typed(const Dataset& ds, std::int64_t f, const KernelConfig& cfg, const SweepOptions& opts) {
  const auto x = random_features<T>(ds.index.size(), static_cast<std::size_t>(f),
                                    sweep_input_seed(opts.seed, ds.id, f));
  BenchOptions bench = bench_options(opts);
  bench.dataset_id = ds.id;
  return benchmark_kernel<T>(ds.index, x, ReduceOp::sum(), cfg, bench);
}

template <typename T>
std::size_t sweep_typed(const std::vector<Dataset>& datasets, const std::vector<std::int64_t>& fs,
                        PerfDB& db, const SweepOptions& opts) {
  std::size_t added = 0;
  BenchOptions bench = bench_options(opts);

  for (const auto& ds : datasets) {
    for (std::int64_t f : fs) {
      std::vector<KernelConfig> pending;
      for (Schedule s : schedules_for(f, opts)) {
        for (const auto& cfg : enumerate_configs(s, opts.candidates)) {
          if (!db.contains({ds.id, f, cfg})) pending.push_back(cfg);
        }
      }
      if (pending.empty()) continue;
      const auto x = random_features<T>(ds.index.size(), static_cast<std::size_t>(f),
                                        sweep_input_seed(opts.seed, ds.id, f));
      bench.dataset_id = ds.id;
      for (auto& rec : benchmark_interleaved<T>(ds.index, x, ReduceOp::sum(), pending, bench)) {
        if (db.insert(rec)) {
          ++added;
          if (opts.on_record) opts.on_record(rec);
        }
      }
    }
  }
  return added;
}

}  // namespace

std::uint64_t sweep_input_seed(std::uint64_t seed, const std::string& dataset_id, std::int64_t feature_size) {
  return mix_seed(seed, stable_hash(dataset_id) ^ static_cast<std::uint64_t>(feature_size));
}

PerfRecord measure_point(const Dataset& dataset, std::int64_t feature_size, const KernelConfig& cfg,
                         const SweepOptions& opts) {
  if (feature_size < 1) throw std::invalid_argument("measure_point: feature size must be >= 1");
  if (opts.element_kind == ElementKind::F64) return measure_typed<double>(dataset, feature_size, cfg, opts);
  return measure_typed<float>(dataset, feature_size, cfg, opts);
}

std::size_t sweep_points_per_pair(std::int64_t feature_size, const SweepOptions& opts) {
  std::size_t n = 0;
  for (Schedule s : schedules_for(feature_size, opts)) n += enumerate_configs(s, opts.candidates).size();
  return n;
}

std::size_t sweep(const std::vector<Dataset>& datasets, const std::vector<std::int64_t>& feature_sizes,
                  PerfDB& db, const SweepOptions& opts) {
  if (datasets.empty()) throw std::invalid_argument("sweep: no datasets");
  if (feature_sizes.empty()) throw std::invalid_argument("sweep: empty feature-size list");
  for (auto f : feature_sizes) {
    if (f < 1) throw std::invalid_argument("sweep: feature sizes must be >= 1");
  }
  for (const auto& ds : datasets) {
    if (ds.index.empty()) throw std::invalid_argument("sweep: dataset '" + ds.id + "' is empty");
  }
  if (db.empty()) {
    db.metadata().element_kind = opts.element_kind;
  } else if (db.metadata().element_kind != opts.element_kind) {
    throw std::invalid_argument("sweep: DB element kind differs from the requested one");
  }
  if (opts.element_kind == ElementKind::F64) return sweep_typed<double>(datasets, feature_sizes, db, opts);
  return sweep_typed<float>(datasets, feature_sizes, db, opts);
}

}  // namespace segred
