#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "segred/benchmark.hpp"
#include "segred/perfdb.hpp"
#include "segred/segmented_index.hpp"

namespace segred {

struct Dataset {
  std::string id;
  SegmentedIndex index;
};

struct SweepOptions {
  /// Measure both schedules for every F instead of only default_schedule(F).
  bool both_schedules = false;
  /// Timed rounds per config; configs of one (dataset, F) pair are
  /// interleaved round by round.
  int reps = 9;
  std::int64_t min_sample_ns = 300'000;
  int workers = 0;
  std::uint64_t seed = 0;
  ElementKind element_kind = ElementKind::F32;
  CandidateSets candidates = CandidateSets::defaults();
  /// Called after each new record is inserted, e.g. to append it to a file.
  std::function<void(const PerfRecord&)> on_record;
};

/// Number of configurations a sweep visits for one (dataset, F) pair.
std::size_t sweep_points_per_pair(std::int64_t feature_size, const SweepOptions& opts);

/// Seed of the random X a sweep uses for (dataset_id, F).
std::uint64_t sweep_input_seed(std::uint64_t seed, const std::string& dataset_id, std::int64_t feature_size);

/// Benchmarks one point with the same inputs a sweep would use.
PerfRecord measure_point(const Dataset& dataset, std::int64_t feature_size, const KernelConfig& cfg,
                         const SweepOptions& opts = {});

/// Measures datasets x F_list x config space into db, skipping keys already
/// present. Returns the number of new records. If on_record throws, the
/// exception propagates and db keeps every record inserted so far.
std::size_t sweep(const std::vector<Dataset>& datasets, const std::vector<std::int64_t>& feature_sizes,
                  PerfDB& db, const SweepOptions& opts = {});

}  // namespace segred
