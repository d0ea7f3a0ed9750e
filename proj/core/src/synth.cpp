#include "segred/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "segred/dataset_id.hpp"

namespace segred {
namespace {

/// Splits `total` into parts proportional to weights, exactly.
std::vector<std::int64_t> apportion(std::int64_t total, const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::int64_t> parts(weights.size(), 0);
  if (total == 0 || weights.empty()) return parts;
  if (!(sum > 0.0)) {
    // Degenerate weights: spread evenly.
    for (std::size_t i = 0; i < parts.size(); ++i) {
      parts[i] = total / static_cast<std::int64_t>(parts.size()) +
                 (static_cast<std::int64_t>(i) < total % static_cast<std::int64_t>(parts.size()));
    }
    return parts;
  }
  std::vector<std::pair<double, std::size_t>> remainders(weights.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    parts[i] = static_cast<std::int64_t>(std::floor(exact));
    assigned += parts[i];
    remainders[i] = {exact - static_cast<double>(parts[i]), i};
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
    ++parts[remainders[k % remainders.size()].second];
  }
  return parts;
}

double draw_weight(const LengthDistribution& dist, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  if (dist.kind == LengthDistribution::Kind::Uniform) return u;
  // Pareto with density ~ w^-alpha on [1, inf).
  return std::pow(1.0 - u, -1.0 / (dist.alpha - 1.0));
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed ^ (stream + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stable_hash(const std::string& text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_string(const LengthDistribution& dist) {
  if (dist.kind == LengthDistribution::Kind::Uniform) return "uniform";
  return "powerlaw:" + format_real(dist.alpha);
}

LengthDistribution parse_distribution(const std::string& text) {
  if (text == "uniform") return LengthDistribution::uniform();
  const std::string prefix = "powerlaw:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(text.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - prefix.size()) {
      throw std::invalid_argument("bad power-law exponent in '" + text + "'");
    }
    if (!(alpha > 1.0)) throw std::invalid_argument("power-law alpha must be > 1, got '" + text + "'");
    return LengthDistribution::power_law(alpha);
  }
  throw std::invalid_argument("unknown distribution '" + text + "' (uniform | powerlaw:<alpha>)");
}

SegmentedIndex synth_index(std::int64_t num_segments, double target_avg, LengthDistribution dist,
                           std::uint64_t seed) {
  if (num_segments < 1) throw std::invalid_argument("synth_index: num_segments must be >= 1");
  if (!(target_avg >= 0.0) || !std::isfinite(target_avg)) {
    throw std::invalid_argument("synth_index: target_avg must be finite and >= 0");
  }
  if (dist.kind == LengthDistribution::Kind::PowerLaw && !(dist.alpha > 1.0)) {
    throw std::invalid_argument("synth_index: power-law alpha must be > 1");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> weights(static_cast<std::size_t>(num_segments));
  for (auto& w : weights) w = draw_weight(dist, rng);
  const auto total = static_cast<std::int64_t>(std::llround(static_cast<double>(num_segments) * target_avg));
  const auto lengths = apportion(total, weights);

  std::vector<index_t> values;
  values.reserve(static_cast<std::size_t>(total));
  for (std::size_t s = 0; s < lengths.size(); ++s) {
    values.insert(values.end(), static_cast<std::size_t>(lengths[s]), static_cast<index_t>(s));
  }
  return SegmentedIndex(std::move(values), num_segments);
}

std::vector<std::int64_t> segment_lengths(const SegmentedIndex& idx) {
  std::vector<std::int64_t> lengths(static_cast<std::size_t>(idx.idx_max()), 0);
  for (index_t v : idx.values()) ++lengths[static_cast<std::size_t>(v)];
  return lengths;
}

SegmentedIndex index_from_lengths(const std::vector<std::int64_t>& lengths) {
  std::vector<index_t> values;
  for (std::size_t s = 0; s < lengths.size(); ++s) {
    if (lengths[s] < 0) throw std::invalid_argument("index_from_lengths: negative length");
    values.insert(values.end(), static_cast<std::size_t>(lengths[s]), static_cast<index_t>(s));
  }
  return SegmentedIndex(std::move(values), std::max<index_t>(1, static_cast<index_t>(lengths.size())));
}

SegmentedIndex augment_index(const SegmentedIndex& base, AugmentParams params, std::uint64_t seed) {
  if (!(params.scale > 0.0) || !std::isfinite(params.scale)) {
    throw std::invalid_argument("augment: scale factors must be > 0");
  }
  if (!(params.noise >= 0.0 && params.noise <= 1.0)) {
    throw std::invalid_argument("augment: noise level must be in [0, 1]");
  }
  const auto base_lengths = segment_lengths(base);
  if (base_lengths.empty()) throw std::invalid_argument("augment: degenerate base (no entries)");

  const auto base_count = static_cast<std::int64_t>(base_lengths.size());
  const std::int64_t count =
      std::max<std::int64_t>(1, std::llround(params.scale * static_cast<double>(base_count)));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(1.0 - params.noise, 1.0 + params.noise);

  std::vector<std::int64_t> lengths(static_cast<std::size_t>(count));
  std::int64_t total = 0;
  for (std::int64_t j = 0; j < count; ++j) {
    const auto src = std::min<std::int64_t>(
        base_count - 1,
        static_cast<std::int64_t>(std::floor((static_cast<double>(j) + 0.5) / params.scale)));
    std::int64_t len = base_lengths[static_cast<std::size_t>(src)];
    if (params.noise > 0.0) len = std::llround(static_cast<double>(len) * jitter(rng));
    lengths[static_cast<std::size_t>(j)] = len;
    total += len;
  }
  if (total == 0) lengths.back() = 1;
  return index_from_lengths(lengths);
}

std::vector<SegmentedIndex> augment_dataset(const SegmentedIndex& base,
                                            const std::vector<double>& scale_factors,
                                            const std::vector<double>& noise_levels,
                                            std::uint64_t seed) {
  std::vector<SegmentedIndex> out;
  out.reserve(scale_factors.size() * noise_levels.size());
  std::uint64_t k = 0;
  for (double s : scale_factors) {
    for (double e : noise_levels) {
      out.push_back(augment_index(base, {s, e}, mix_seed(seed, k++)));
    }
  }
  return out;
}

std::vector<double> default_scale_grid() { return {0.5, 0.75, 1.0, 1.5, 2.0, 3.0}; }

std::vector<double> default_noise_grid() {
  return {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45};
}

const std::vector<GraphShape>& reference_graph_shapes() {
  static const std::vector<GraphShape> shapes = {
      {"citeseer", 3327, 9104},          {"cora", 2708, 10556},
      {"ppi", 2245, 61318},              {"pubmed", 19717, 88648},
      {"amazon-photo", 7650, 238162},    {"flickr", 89250, 899756},
      {"ogbn-arxiv", 169343, 1166243},   {"ogbl-collab", 235868, 1285465},
      {"reddit2", 232965, 23213838},
  };
  return shapes;
}

const GraphShape& reference_graph_shape(const std::string& name) {
  for (const auto& s : reference_graph_shapes()) {
    if (name == s.name) return s;
  }
  throw std::invalid_argument("unknown reference graph '" + name + "'");
}

SyntheticGraph synth_graph(std::int64_t nodes, std::int64_t edges, std::uint64_t seed, double alpha) {
  if (nodes < 1 || edges < 0) throw std::invalid_argument("synth_graph: need nodes >= 1, edges >= 0");
  const SegmentedIndex dst = synth_index(nodes, static_cast<double>(edges) / static_cast<double>(nodes),
                                         LengthDistribution::power_law(alpha), seed);
  SyntheticGraph g;
  g.num_nodes = nodes;
  g.dst.assign(dst.values().begin(), dst.values().end());
  g.src.resize(g.dst.size());
  std::mt19937_64 rng(mix_seed(seed, 1));
  std::uniform_int_distribution<index_t> pick(0, nodes - 1);
  for (auto& s : g.src) s = pick(rng);
  for (std::size_t begin = 0; begin < g.dst.size();) {
    std::size_t end = begin;
    while (end < g.dst.size() && g.dst[end] == g.dst[begin]) ++end;
    std::sort(g.src.begin() + static_cast<std::ptrdiff_t>(begin), g.src.begin() + static_cast<std::ptrdiff_t>(end));
    begin = end;
  }
  return g;
}

}  // namespace segred
