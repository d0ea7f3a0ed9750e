#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace segred {

/// Integer type used for all index arrays (Idx, gather sources, output rows).
using index_t = std::int64_t;

/// Element kind of a FeatureMatrix, recorded in persisted artifacts.
enum class ElementKind : std::uint8_t { F32 = 0, F64 = 1 };

std::string_view to_string(ElementKind kind) noexcept;
ElementKind parse_element_kind(std::string_view text);

template <typename T>
struct element_kind_of;
template <>
struct element_kind_of<float> {
  static constexpr ElementKind value = ElementKind::F32;
};
template <>
struct element_kind_of<double> {
  static constexpr ElementKind value = ElementKind::F64;
};

/// Raised by file readers. Carries the 1-based line number of the offending input.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Library version string stamped into every artifact header.
inline constexpr std::string_view kVersion = SEGRED_VERSION;

}  // namespace segred
