#pragma once

#include <compare>
#include <optional>
#include <string>

namespace island {

// Model identifier of the form "provider/name", both lowercase slugs.
// The id splits on the first '/' only, so the name part may itself
// contain slashes.
struct ModelRef {
  std::string provider;
  std::string name;

  std::string id() const { return provider + "/" + name; }

  // Throws std::invalid_argument on a malformed id.
  static ModelRef parse(const std::string& id);
  static std::optional<ModelRef> try_parse(const std::string& id);

  bool operator==(const ModelRef&) const = default;
  auto operator<=>(const ModelRef&) const = default;
};

}  // namespace island
