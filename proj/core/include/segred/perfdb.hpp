#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "segred/features.hpp"
#include "segred/schedule.hpp"
#include "segred/types.hpp"

namespace segred {

/// One benchmark observation.
struct PerfRecord {
  std::string dataset_id;
  FeatureVector features;
  KernelConfig config;
  double gflops = 0.0;
  std::int64_t time_ns = 0;  ///< median over reps
  int reps = 0;

  friend bool operator==(const PerfRecord&, const PerfRecord&) = default;
};

struct DbMetadata {
  std::string machine = "unknown";
  ElementKind element_kind = ElementKind::F32;
  std::string version = std::string(kVersion);
  std::uint64_t seed = 0;
  std::string created_at;

  friend bool operator==(const DbMetadata&, const DbMetadata&) = default;
};

/// Append-only performance database keyed by (dataset_id, F, config).
class PerfDB {
 public:
  using Key = std::tuple<std::string, std::int64_t, KernelConfig>;

  PerfDB() = default;
  explicit PerfDB(DbMetadata meta) : meta_(std::move(meta)) {}

  const DbMetadata& metadata() const noexcept { return meta_; }
  DbMetadata& metadata() noexcept { return meta_; }

  const std::vector<PerfRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Returns false (and leaves the DB unchanged) when the key already exists.
  bool insert(PerfRecord record);
  bool contains(const Key& key) const { return index_.count(key) != 0; }
  const PerfRecord* find(const Key& key) const;

  static Key key_of(const PerfRecord& r) {
    return {r.dataset_id, r.features.feature_size, r.config};
  }

  friend bool operator==(const PerfDB& a, const PerfDB& b) {
    return a.meta_ == b.meta_ && a.records_ == b.records_;
  }

 private:
  DbMetadata meta_;
  std::vector<PerfRecord> records_;
  std::map<Key, std::size_t> index_;
};

/// Line-delimited format: a header object (machine, element_kind, version,
/// seed, created_at) followed by one flat JSON object per record.
std::string format_db_header(const DbMetadata& meta);
std::string format_db_record(const PerfRecord& record);

void save_db(const PerfDB& db, const std::string& path);

/// Throws ParseError naming the first malformed line.
PerfDB load_db(const std::string& path);
PerfDB parse_db(const std::string& text, const std::string& source = "<string>");

/// Appends one record line to an existing DB file (used for resumable sweeps).
void append_db_record(const std::string& path, const PerfRecord& record);

}  // namespace segred
