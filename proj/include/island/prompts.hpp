#pragma once

#include <map>
#include <string>

namespace island::prompts {

// Returns the template with the given name (file stem under
// assets/prompts/). Templates are embedded at build time; setting
// ISLAND_PROMPT_DIR points lookups at an alternative directory instead.
// Throws std::out_of_range for unknown names.
const std::string& text(const std::string& name);

// Replaces each {{key}} with its value. Unknown placeholders are left
// untouched.
std::string render(const std::string& tmpl,
                   const std::map<std::string, std::string>& vars);

}  // namespace island::prompts
