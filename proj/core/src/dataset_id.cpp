#include "segred/dataset_id.hpp"

#include <charconv>
#include <map>
#include <stdexcept>

namespace segred {
namespace {

const std::string kAugTag = "+aug(";

/// Parses "k1=v1,k2=v2" into a map; keys must be unique.
std::map<std::string, std::string> parse_fields(const std::string& body, const std::string& whole) {
  std::map<std::string, std::string> fields;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::size_t comma = std::min(body.find(',', pos), body.size());
    const std::string part = body.substr(pos, comma - pos);
    const auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("malformed dataset_id field '" + part + "' in '" + whole + "'");
    }
    if (!fields.emplace(part.substr(0, eq), part.substr(eq + 1)).second) {
      throw std::invalid_argument("duplicate field in dataset_id '" + whole + "'");
    }
    pos = comma + 1;
  }
  return fields;
}

const std::string& take(const std::map<std::string, std::string>& fields, const char* key,
                        const std::string& whole) {
  auto it = fields.find(key);
  if (it == fields.end()) {
    throw std::invalid_argument("dataset_id '" + whole + "' lacks field '" + key + "'");
  }
  return it->second;
}

template <typename Int>
Int to_int(const std::string& s, const std::string& whole) {
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument("bad integer '" + s + "' in dataset_id '" + whole + "'");
  }
  return v;
}

double to_real(const std::string& s, const std::string& whole) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument("bad number '" + s + "' in dataset_id '" + whole + "'");
  }
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string format_dataset_id(const DatasetId& id) {
  std::string out;
  if (id.synthetic) {
    const auto& s = *id.synthetic;
    out = "synth(dist=" + to_string(s.dist) + ",segments=" + std::to_string(s.segments) +
          ",avg=" + format_real(s.avg) + ",seed=" + std::to_string(s.seed) + ")";
  } else {
    out = "graph(" + id.graph_path + ")";
  }
  if (id.augment) {
    out += kAugTag + "scale=" + format_real(id.augment->params.scale) +
           ",noise=" + format_real(id.augment->params.noise) +
           ",seed=" + std::to_string(id.augment->seed) + ")";
  }
  return out;
}

DatasetId parse_dataset_id(const std::string& text) {
  DatasetId id;
  std::string base = text;
  if (const auto aug = text.rfind(kAugTag); aug != std::string::npos) {
    if (text.back() != ')') throw std::invalid_argument("unterminated +aug(...) in '" + text + "'");
    const auto fields = parse_fields(text.substr(aug + kAugTag.size(), text.size() - aug - kAugTag.size() - 1), text);
    DatasetId::Augment a;
    a.params.scale = to_real(take(fields, "scale", text), text);
    a.params.noise = to_real(take(fields, "noise", text), text);
    a.seed = to_int<std::uint64_t>(take(fields, "seed", text), text);
    if (fields.size() != 3) throw std::invalid_argument("unexpected +aug field in '" + text + "'");
    id.augment = a;
    base = text.substr(0, aug);
  }
  if (base.size() < 2 || base.back() != ')') {
    throw std::invalid_argument("malformed dataset_id '" + text + "'");
  }
  if (base.rfind("synth(", 0) == 0) {
    const auto fields = parse_fields(base.substr(6, base.size() - 7), text);
    DatasetId::Synthetic s;
    s.dist = parse_distribution(take(fields, "dist", text));
    s.segments = to_int<std::int64_t>(take(fields, "segments", text), text);
    s.avg = to_real(take(fields, "avg", text), text);
    s.seed = to_int<std::uint64_t>(take(fields, "seed", text), text);
    if (fields.size() != 4) throw std::invalid_argument("unexpected synth field in '" + text + "'");
    id.synthetic = s;
  } else if (base.rfind("graph(", 0) == 0) {
    id.graph_path = base.substr(6, base.size() - 7);
    if (id.graph_path.empty()) throw std::invalid_argument("empty graph path in '" + text + "'");
  } else {
    throw std::invalid_argument("dataset_id '" + text + "' must start with synth( or graph(");
  }
  return id;
}

SegmentedIndex materialize(const DatasetId& id, const GraphIndexLoader& graphs) {
  SegmentedIndex base;
  if (id.synthetic) {
    const auto& s = *id.synthetic;
    base = synth_index(s.segments, s.avg, s.dist, s.seed);
  } else {
    if (!graphs) {
      throw std::invalid_argument("dataset '" + format_dataset_id(id) + "' needs a graph loader");
    }
    base = graphs(id.graph_path);
  }
  if (id.augment) return augment_index(base, id.augment->params, id.augment->seed);
  return base;
}

SegmentedIndex materialize(const std::string& dataset_id, const GraphIndexLoader& graphs) {
  return materialize(parse_dataset_id(dataset_id), graphs);
}

}  // namespace segred
