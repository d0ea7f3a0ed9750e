#include "segred/types.hpp"

namespace segred {

std::string_view to_string(ElementKind kind) noexcept {
  return kind == ElementKind::F32 ? "f32" : "f64";
}

ElementKind parse_element_kind(std::string_view text) {
  if (text == "f32" || text == "float") return ElementKind::F32;
  if (text == "f64" || text == "double") return ElementKind::F64;
  throw std::invalid_argument("unknown element kind '" + std::string(text) + "'");
}

}  // namespace segred
