#include "matrix_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace segred::cli {
namespace {

static_assert(std::endian::native == std::endian::little, "matrix files assume a little-endian host");

constexpr char kMagic[8] = {'S', 'E', 'G', 'R', 'E', 'D', 'Y', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename V>
void put(std::ofstream& out, V v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename V>
V get(std::ifstream& in, const std::string& path) {
  V v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error(path + ": truncated header");
  return v;
}

template <typename T>
FeatureMatrix<T> read_payload(std::ifstream& in, std::int64_t rows, std::int64_t cols, const std::string& path) {
  FeatureMatrix<T> m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  auto span = m.data();
  const auto bytes = static_cast<std::streamsize>(span.size() * sizeof(T));
  if (!in.read(reinterpret_cast<char*>(span.data()), bytes)) throw std::runtime_error(path + ": truncated data");
  if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error(path + ": trailing bytes");
  return m;
}

}  // namespace

template <typename T>
void save_matrix(const FeatureMatrix<T>& m, std::uint64_t seed, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, element_kind_of<T>::value == ElementKind::F32 ? 0u : 1u);
  put<std::int64_t>(out, static_cast<std::int64_t>(m.rows()));
  put<std::int64_t>(out, static_cast<std::int64_t>(m.cols()));
  put<std::uint64_t>(out, seed);
  auto span = m.data();
  out.write(reinterpret_cast<const char*>(span.data()), static_cast<std::streamsize>(span.size() * sizeof(T)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

MatrixFile load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw std::runtime_error(path + ": not a segred matrix file");
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kFormatVersion) throw std::runtime_error(path + ": unsupported version " + std::to_string(version));
  const auto kind = get<std::uint32_t>(in, path);
  const auto rows = get<std::int64_t>(in, path);
  const auto cols = get<std::int64_t>(in, path);
  MatrixFile file;
  file.seed = get<std::uint64_t>(in, path);
  if (rows < 0 || cols < 0) throw std::runtime_error(path + ": negative shape");
  if (kind == 0) {
    file.data = read_payload<float>(in, rows, cols, path);
  } else if (kind == 1) {
    file.data = read_payload<double>(in, rows, cols, path);
  } else {
    throw std::runtime_error(path + ": unknown element kind " + std::to_string(kind));
  }
  return file;
}

template <typename T>
std::string format_matrix_text(const FeatureMatrix<T>& m) {
  std::string out;
  char buf[64];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += '\t';
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, m(r, c));
      out.append(buf, p);
    }
    out += '\n';
  }
  return out;
}

template void save_matrix<float>(const FeatureMatrix<float>&, std::uint64_t, const std::string&);
template void save_matrix<double>(const FeatureMatrix<double>&, std::uint64_t, const std::string&);
template std::string format_matrix_text<float>(const FeatureMatrix<float>&);
template std::string format_matrix_text<double>(const FeatureMatrix<double>&);

}  // namespace segred::cli
