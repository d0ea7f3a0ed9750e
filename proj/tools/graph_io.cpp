#include "graph_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "segred/dataset_id.hpp"
#include "segred/types.hpp"

namespace segred::cli {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::int64_t parse_int(std::string_view tok, const std::string& source, std::size_t line, const char* what) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw ParseError(source, line, std::string("bad ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

double parse_double(std::string_view tok, const std::string& source, std::size_t line) {
  double v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw ParseError(source, line, "bad weight '" + std::string(tok) + "'");
  }
  return v;
}

template <typename F>
void for_each_line(const std::string& text, F&& f) {
  std::size_t line = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    f(std::string_view(text).substr(pos, end - pos), ++line);
    pos = end + 1;
  }
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

GraphFormat parse_graph_format(const std::string& text) {
  const std::string t = lower(text);
  if (t == "tsv" || t == "edgelist" || t == "tsv-edgelist") return GraphFormat::Tsv;
  if (t == "mtx" || t == "matrixmarket") return GraphFormat::MatrixMarket;
  throw std::invalid_argument("unknown graph format '" + text + "' (expected tsv or mtx)");
}

GraphFormat guess_graph_format(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos && lower(path.substr(dot)) == ".mtx") return GraphFormat::MatrixMarket;
  return GraphFormat::Tsv;
}

void EdgeList::canonicalize() {
  std::vector<std::size_t> order(dst.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dst[a] != dst[b] ? dst[a] < dst[b] : src[a] < src[b];
  });
  auto permute = [&](auto& v) {
    if (v.empty()) return;
    auto copy = v;
    for (std::size_t i = 0; i < order.size(); ++i) v[i] = copy[order[i]];
  };
  permute(src);
  permute(dst);
  permute(weight);
}

SegmentedIndex EdgeList::dst_index() const { return SegmentedIndex(dst, num_nodes); }

EdgeList parse_tsv(const std::string& text, const std::string& source) {
  EdgeList g;
  std::optional<std::int64_t> declared;
  std::int64_t max_id = -1;
  std::size_t weighted_lines = 0;
  for_each_line(text, [&](std::string_view line, std::size_t n) {
    if (!line.empty() && line.front() == '#') {
      auto toks = split_ws(line.substr(1));
      for (auto t : toks) {
        if (t.substr(0, 6) == "nodes=") declared = parse_int(t.substr(6), source, n, "node count");
      }
      return;
    }
    auto toks = split_ws(line);
    if (toks.empty()) return;
    if (toks.size() < 2 || toks.size() > 3) {
      throw ParseError(source, n, "expected 'src<TAB>dst[<TAB>w]', got " + std::to_string(toks.size()) +
                                      " fields");
    }
    const auto s = parse_int(toks[0], source, n, "src");
    const auto d = parse_int(toks[1], source, n, "dst");
    if (s < 0 || d < 0) throw ParseError(source, n, "negative node id");
    if (declared && (s >= *declared || d >= *declared)) {
      throw ParseError(source, n, "node id out of bounds (nodes=" + std::to_string(*declared) + ")");
    }
    if (toks.size() == 3) {
      if (weighted_lines != g.size()) throw ParseError(source, n, "weight column must be on every line");
      g.weight.push_back(parse_double(toks[2], source, n));
      ++weighted_lines;
    } else if (weighted_lines != 0) {
      throw ParseError(source, n, "weight column must be on every line");
    }
    g.src.push_back(s);
    g.dst.push_back(d);
    max_id = std::max({max_id, s, d});
  });
  g.num_nodes = declared ? *declared : max_id + 1;
  if (g.size() == 0) throw ParseError(source, 0, "no edges");
  g.canonicalize();
  return g;
}

EdgeList parse_matrix_market(const std::string& text, const std::string& source) {
  EdgeList g;
  bool header_seen = false, size_seen = false, pattern = false, symmetric = false;
  std::int64_t rows = 0, cols = 0, nnz = 0, entries = 0;
  for_each_line(text, [&](std::string_view line, std::size_t n) {
    if (!header_seen) {
      auto toks = split_ws(line);
      if (toks.size() != 5 || lower(std::string(toks[0])) != "%%matrixmarket" ||
          lower(std::string(toks[1])) != "matrix" || lower(std::string(toks[2])) != "coordinate") {
        throw ParseError(source, n, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'");
      }
      const auto field = lower(std::string(toks[3]));
      const auto sym = lower(std::string(toks[4]));
      if (field == "pattern") {
        pattern = true;
      } else if (field != "real" && field != "integer" && field != "double") {
        throw ParseError(source, n, "unsupported field '" + field + "'");
      }
      if (sym == "symmetric") {
        symmetric = true;
      } else if (sym != "general") {
        throw ParseError(source, n, "unsupported symmetry '" + sym + "'");
      }
      header_seen = true;
      return;
    }
    if (!line.empty() && line.front() == '%') return;
    auto toks = split_ws(line);
    if (toks.empty()) return;
    if (!size_seen) {
      if (toks.size() != 3) throw ParseError(source, n, "expected size line 'rows cols nnz'");
      rows = parse_int(toks[0], source, n, "row count");
      cols = parse_int(toks[1], source, n, "column count");
      nnz = parse_int(toks[2], source, n, "entry count");
      if (rows < 1 || cols < 1 || nnz < 0) throw ParseError(source, n, "invalid size line");
      size_seen = true;
      return;
    }
    const std::size_t want = pattern ? 2 : 3;
    if (toks.size() != want) {
      throw ParseError(source, n, "expected " + std::to_string(want) + " fields per entry");
    }
    if (++entries > nnz) throw ParseError(source, n, "more entries than declared");
    const auto i = parse_int(toks[0], source, n, "row");
    const auto j = parse_int(toks[1], source, n, "column");
    if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError(source, n, "entry out of declared bounds");
    const double w = pattern ? 1.0 : parse_double(toks[2], source, n);
    auto push = [&](std::int64_t d, std::int64_t s) {
      g.dst.push_back(d);
      g.src.push_back(s);
      if (!pattern) g.weight.push_back(w);
    };
    push(i - 1, j - 1);
    if (symmetric && i != j) push(j - 1, i - 1);
  });
  if (!header_seen) throw ParseError(source, 1, "empty file");
  if (!size_seen) throw ParseError(source, 0, "missing size line");
  if (entries != nnz) {
    throw ParseError(source, 0, "declared " + std::to_string(nnz) + " entries, found " + std::to_string(entries));
  }
  if (g.size() == 0) throw ParseError(source, 0, "no edges");
  g.num_nodes = std::max(rows, cols);
  g.canonicalize();
  return g;
}

EdgeList load_graph(const std::string& path, std::optional<GraphFormat> format) {
  const auto fmt = format.value_or(guess_graph_format(path));
  const auto text = read_file(path);
  return fmt == GraphFormat::MatrixMarket ? parse_matrix_market(text, path) : parse_tsv(text, path);
}

std::string format_tsv(const EdgeList& g) {
  std::string out = "# nodes=" + std::to_string(g.num_nodes) + "\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    out += std::to_string(g.src[i]) + '\t' + std::to_string(g.dst[i]);
    if (g.weighted()) out += '\t' + format_real(g.weight[i]);
    out += '\n';
  }
  return out;
}

void save_graph_tsv(const EdgeList& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << format_tsv(g);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace segred::cli
