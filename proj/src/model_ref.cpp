#include "island/model_ref.hpp"

#include <cctype>
#include <stdexcept>

namespace island {

namespace {

bool valid_slug(const std::string& s) {
  if (s.empty()) return false;
  for (unsigned char c : s) {
    if (std::isspace(c) || std::isupper(c)) return false;
  }
  return true;
}

}  // namespace

ModelRef ModelRef::parse(const std::string& id) {
  auto ref = try_parse(id);
  if (!ref) {
    throw std::invalid_argument("bad model id \"" + id +
                                "\": expected lowercase \"provider/name\"");
  }
  return *ref;
}

std::optional<ModelRef> ModelRef::try_parse(const std::string& id) {
  auto slash = id.find('/');
  if (slash == std::string::npos) return std::nullopt;
  ModelRef ref{id.substr(0, slash), id.substr(slash + 1)};
  if (!valid_slug(ref.provider) || !valid_slug(ref.name)) return std::nullopt;
  return ref;
}

}  // namespace island
