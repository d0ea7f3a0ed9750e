#include "segred/perfdb.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace segred {
namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "segred-perfdb";

json record_json(const PerfRecord& r) {
  json j;
  j["dataset_id"] = r.dataset_id;
  j["idx_size"] = r.features.idx_size;
  j["idx_max"] = r.features.idx_max;
  j["avg"] = r.features.avg;
  j["F"] = r.features.feature_size;
  j["schedule"] = std::string(to_string(r.config.schedule));
  j["T_N"] = r.config.t_n;
  j["T_M"] = r.config.t_m;
  j["M_t"] = r.config.m_t;
  j["N_t"] = r.config.n_t;
  j["G_t"] = r.config.g_t;
  j["reps"] = r.reps;
  j["time_ns"] = r.time_ns;
  j["gflops"] = r.gflops;
  return j;
}

template <typename V>
V field(const json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  return j.at(key).get<V>();
}

PerfRecord record_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  PerfRecord r;
  r.dataset_id = field<std::string>(j, "dataset_id");
  r.features.idx_size = field<std::int64_t>(j, "idx_size");
  r.features.idx_max = field<std::int64_t>(j, "idx_max");
  r.features.avg = field<double>(j, "avg");
  r.features.feature_size = field<std::int64_t>(j, "F");
  r.config.schedule = parse_schedule(field<std::string>(j, "schedule"));
  r.config.t_n = field<int>(j, "T_N");
  r.config.t_m = field<int>(j, "T_M");
  r.config.m_t = field<int>(j, "M_t");
  r.config.n_t = field<int>(j, "N_t");
  r.config.g_t = field<int>(j, "G_t");
  r.reps = field<int>(j, "reps");
  r.time_ns = field<std::int64_t>(j, "time_ns");
  r.gflops = field<double>(j, "gflops");
  if (auto v = structural_violations(r.config); !v.empty()) {
    throw std::invalid_argument("invalid config: " + v.front());
  }
  if (r.reps < 3) throw std::invalid_argument("reps must be >= 3");
  if (!(r.gflops > 0.0)) throw std::invalid_argument("gflops must be > 0");
  if (r.time_ns <= 0) throw std::invalid_argument("time_ns must be > 0");
  if (r.features.idx_size < 1 || r.features.idx_max < 1 || r.features.feature_size < 1) {
    throw std::invalid_argument("features must be positive");
  }
  return r;
}

}  // namespace

bool PerfDB::insert(PerfRecord record) {
  auto key = key_of(record);
  if (index_.count(key)) return false;
  index_.emplace(std::move(key), records_.size());
  records_.push_back(std::move(record));
  return true;
}

const PerfRecord* PerfDB::find(const Key& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::string format_db_header(const DbMetadata& meta) {
  json j;
  j["format"] = kFormatTag;
  j["machine"] = meta.machine;
  j["element_kind"] = std::string(to_string(meta.element_kind));
  j["version"] = meta.version;
  j["seed"] = meta.seed;
  j["created_at"] = meta.created_at;
  return j.dump();
}

std::string format_db_record(const PerfRecord& record) { return record_json(record).dump(); }

void save_db(const PerfDB& db, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write perf DB '" + path + "'");
  out << format_db_header(db.metadata()) << '\n';
  for (const auto& r : db.records()) out << format_db_record(r) << '\n';
  if (!out) throw std::runtime_error("write failed for perf DB '" + path + "'");
}

void append_db_record(const std::string& path, const PerfRecord& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to perf DB '" + path + "'");
  out << format_db_record(record) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed for perf DB '" + path + "'");
}

PerfDB parse_db(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  PerfDB db;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(source, line_no, std::string("malformed record: ") + e.what());
    }
    try {
      if (!have_header) {
        if (!j.is_object() || j.value("format", "") != kFormatTag) {
          throw std::invalid_argument("missing perf DB header");
        }
        DbMetadata meta;
        meta.machine = field<std::string>(j, "machine");
        meta.element_kind = parse_element_kind(field<std::string>(j, "element_kind"));
        meta.version = field<std::string>(j, "version");
        meta.seed = j.value<std::uint64_t>("seed", 0);
        meta.created_at = j.value("created_at", "");
        db = PerfDB(std::move(meta));
        have_header = true;
        continue;
      }
      if (!db.insert(record_from_json(j))) throw std::invalid_argument("duplicate (dataset_id, F, config) key");
    } catch (const json::exception& e) {
      throw ParseError(source, line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  if (!have_header) throw ParseError(source, line_no == 0 ? 1 : line_no, "missing perf DB header");
  return db;
}

PerfDB load_db(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open perf DB '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_db(buf.str(), path);
}

}  // namespace segred
