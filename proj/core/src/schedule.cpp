#include "segred/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace segred {
namespace {

bool contains(const std::vector<int>& set, int v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

std::string set_text(const std::vector<int>& set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(set[i]);
  }
  return out + "}";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  int v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    throw std::invalid_argument("bad integer for " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return v;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

std::string_view to_string(Schedule s) noexcept { return s == Schedule::SR ? "SR" : "PR"; }

Schedule parse_schedule(std::string_view text) {
  text = trim(text);
  if (text == "SR" || text == "sr") return Schedule::SR;
  if (text == "PR" || text == "pr") return Schedule::PR;
  throw std::invalid_argument("unknown schedule '" + std::string(text) + "'");
}

std::string format_config(const KernelConfig& cfg) {
  std::string out(to_string(cfg.schedule));
  out += ",T_N=" + std::to_string(cfg.t_n);
  out += ",T_M=" + std::to_string(cfg.t_m);
  out += ",M_t=" + std::to_string(cfg.m_t);
  out += ",N_t=" + std::to_string(cfg.n_t);
  if (cfg.schedule == Schedule::PR || cfg.g_t != 1) out += ",G_t=" + std::to_string(cfg.g_t);
  return out;
}

KernelConfig parse_config(std::string_view text) {
  KernelConfig cfg;
  bool have_schedule = false;
  bool seen[5] = {false, false, false, false, false};
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view part = trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    if (part.empty()) {
      throw std::invalid_argument("empty field in config '" + std::string(text) + "'");
    }
    const std::size_t eq = part.find('=');
    if (eq == std::string_view::npos) {
      if (have_schedule) throw std::invalid_argument("duplicate schedule in config '" + std::string(text) + "'");
      cfg.schedule = parse_schedule(part);
      have_schedule = true;
      continue;
    }
    const std::string_view key = trim(part.substr(0, eq));
    const std::string_view value = part.substr(eq + 1);
    int slot = -1;
    if (key == "T_N") slot = 0, cfg.t_n = parse_int(value, key);
    else if (key == "T_M") slot = 1, cfg.t_m = parse_int(value, key);
    else if (key == "M_t") slot = 2, cfg.m_t = parse_int(value, key);
    else if (key == "N_t") slot = 3, cfg.n_t = parse_int(value, key);
    else if (key == "G_t") slot = 4, cfg.g_t = parse_int(value, key);
    else throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
    if (seen[slot]) throw std::invalid_argument("duplicate config key '" + std::string(key) + "'");
    seen[slot] = true;
  }
  if (!have_schedule) throw std::invalid_argument("config '" + std::string(text) + "' lacks SR/PR");
  for (int i = 0; i < 4; ++i) {
    if (!seen[i]) throw std::invalid_argument("config '" + std::string(text) + "' is missing a tiling key");
  }
  if (cfg.schedule == Schedule::PR && !seen[4]) {
    throw std::invalid_argument("PR config '" + std::string(text) + "' needs G_t");
  }
  return cfg;
}

const CandidateSets& CandidateSets::defaults() {
  static const CandidateSets sets{};
  return sets;
}

CandidateSets CandidateSets::parse(std::string_view text, const std::string& source) {
  CandidateSets sets;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key=v1,v2,...");
    const std::string_view key = trim(line.substr(0, eq));
    std::vector<int>* target = nullptr;
    if (key == "T_N") target = &sets.t_n;
    else if (key == "T_M") target = &sets.t_m;
    else if (key == "M_t") target = &sets.m_t;
    else if (key == "N_t") target = &sets.n_t;
    else if (key == "G_t") target = &sets.g_t;
    else throw ParseError(source, line_no, "unknown key '" + std::string(key) + "'");
    std::vector<int> values;
    std::string_view rest = line.substr(eq + 1);
    while (true) {
      const auto comma = rest.find(',');
      try {
        const int v = parse_int(rest.substr(0, comma), key);
        if (v < 1) throw std::invalid_argument("candidate values must be positive");
        values.push_back(v);
      } catch (const std::invalid_argument& e) {
        throw ParseError(source, line_no, e.what());
      }
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    *target = std::move(values);
  }
  return sets;
}

CandidateSets CandidateSets::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open candidate file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::vector<std::string> structural_violations(const KernelConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.t_n < 1) out.emplace_back("T_N must be positive");
  if (cfg.t_m < 1) out.emplace_back("T_M must be positive");
  if (cfg.m_t < 1) out.emplace_back("M_t must be positive");
  if (cfg.n_t < 1) out.emplace_back("N_t must be positive");
  if (cfg.schedule == Schedule::SR) {
    if (cfg.g_t != 1) out.emplace_back("SR requires G_t=1");
  } else {
    if (cfg.g_t < 2 || cfg.g_t > 32) out.emplace_back("PR requires 2 <= G_t <= 32");
    if (cfg.g_t > cfg.m_t) out.emplace_back("G_t <= M_t");
    if (cfg.g_t >= 1 && cfg.m_t >= 1 && cfg.m_t % cfg.g_t != 0) out.emplace_back("M_t mod G_t = 0");
  }
  return out;
}

std::vector<std::string> validate_config(const KernelConfig& cfg, const CandidateSets& candidates) {
  auto out = structural_violations(cfg);
  const auto member = [&](int v, const std::vector<int>& set, const char* name) {
    if (!contains(set, v)) out.push_back(std::string(name) + " not in " + set_text(set));
  };
  member(cfg.t_n, candidates.t_n, "T_N");
  member(cfg.t_m, candidates.t_m, "T_M");
  member(cfg.m_t, candidates.m_t, "M_t");
  member(cfg.n_t, candidates.n_t, "N_t");
  if (cfg.schedule == Schedule::PR) member(cfg.g_t, candidates.g_t, "G_t");
  return out;
}

std::vector<KernelConfig> enumerate_configs(Schedule schedule, const CandidateSets& candidates) {
  auto sorted = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto t_n = sorted(candidates.t_n);
  const auto t_m = sorted(candidates.t_m);
  const auto m_t = sorted(candidates.m_t);
  const auto n_t = sorted(candidates.n_t);
  const auto g_t = schedule == Schedule::SR ? std::vector<int>{1} : sorted(candidates.g_t);

  std::vector<KernelConfig> out;
  for (int a : t_n)
    for (int b : t_m)
      for (int c : m_t)
        for (int d : n_t)
          for (int e : g_t) {
            KernelConfig cfg{schedule, a, b, c, d, e};
            if (validate_config(cfg, candidates).empty()) out.push_back(cfg);
          }
  return out;
}

Schedule default_schedule(std::int64_t feature_size) {
  if (feature_size < 1) throw std::invalid_argument("feature size must be >= 1");
  return feature_size > 4 ? Schedule::SR : Schedule::PR;
}

KernelConfig hand_rule_config(std::int64_t feature_size) {
  if (feature_size < 1) throw std::invalid_argument("feature size must be >= 1");
  if (feature_size <= 4) return {Schedule::PR, 16, 4, 32, 1, 32};
  if (feature_size <= 32) return {Schedule::SR, 32, 4, 16, 1, 1};
  return {Schedule::SR, 64, 2, 16, feature_size > 64 ? 2 : 1, 1};
}

GridShape grid_shape(const KernelConfig& cfg, std::int64_t m, std::int64_t n) {
  if (m < 1 || n < 1) throw std::invalid_argument("grid_shape: M and N must be >= 1");
  if (auto v = structural_violations(cfg); !v.empty()) {
    throw std::invalid_argument("grid_shape: invalid config " + format_config(cfg) + ": " + v.front());
  }
  return {ceil_div(m, cfg.block_rows()), ceil_div(n, cfg.block_cols())};
}

std::size_t group_count(const KernelConfig& cfg, const GridShape& grid) noexcept {
  return static_cast<std::size_t>(grid.blocks_m * grid.blocks_n) *
         static_cast<std::size_t>(cfg.t_m) * static_cast<std::size_t>(cfg.t_n);
}

GroupTile group_tile(const KernelConfig& cfg, const GridShape& grid, std::size_t group) noexcept {
  const auto g = static_cast<std::int64_t>(group);
  const std::int64_t tn = g % cfg.t_n;
  const std::int64_t tm = (g / cfg.t_n) % cfg.t_m;
  const std::int64_t block = g / (static_cast<std::int64_t>(cfg.t_n) * cfg.t_m);
  const std::int64_t bn = block % grid.blocks_n;
  const std::int64_t bm = block / grid.blocks_n;
  GroupTile tile;
  tile.row_begin = bm * cfg.block_rows() + tm * cfg.m_t;
  tile.row_end = tile.row_begin + cfg.m_t;
  tile.col_begin = bn * cfg.block_cols() + tn * cfg.n_t;
  tile.col_end = tile.col_begin + cfg.n_t;
  return tile;
}

}  // namespace segred
