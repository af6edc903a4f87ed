#include "island/prompts.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace island::prompts {

namespace detail {
const std::map<std::string, std::string>& builtin_templates();
}

namespace {

std::map<std::string, std::string> load_override_dir(const std::string& dir) {
  std::map<std::string, std::string> templates = detail::builtin_templates();
  for (auto& [name, text] : templates) {
    std::ifstream in(dir + "/" + name + ".txt", std::ios::binary);
    if (!in) continue;
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  return templates;
}

const std::map<std::string, std::string>& active_templates() {
  static const std::map<std::string, std::string> templates = [] {
    if (const char* dir = std::getenv("ISLAND_PROMPT_DIR")) {
      return load_override_dir(dir);
    }
    return detail::builtin_templates();
  }();
  return templates;
}

}  // namespace

const std::string& text(const std::string& name) {
  const auto& templates = active_templates();
  auto it = templates.find(name);
  if (it == templates.end()) throw std::out_of_range("no prompt template \"" + name + "\"");
  return it->second;
}

std::string render(const std::string& tmpl,
                   const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  size_t pos = 0;
  while (pos < tmpl.size()) {
    size_t open = tmpl.find("{{", pos);
    if (open == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    size_t close = tmpl.find("}}", open + 2);
    if (close == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    out.append(tmpl, pos, open - pos);
    std::string key = tmpl.substr(open + 2, close - open - 2);
    auto it = vars.find(key);
    if (it != vars.end()) {
      out += it->second;
    } else {
      out.append(tmpl, open, close + 2 - open);
    }
    pos = close + 2;
  }
  return out;
}

}  // namespace island::prompts
