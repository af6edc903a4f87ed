#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "island/game_log.hpp"

namespace island {

// Raised by the parsing entry points; the message names the first
// violated field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical encoding: UTF-8 JSON with lexicographically sorted keys and an
// explicit schema_version field. Equal logs serialize to equal bytes.
inline constexpr int kSchemaVersion = 1;

std::string serialize_log(const GameLog& log);
GameLog parse_game_log(const std::string& bytes);

std::string serialize_manifest(const Manifest& manifest);
Manifest parse_manifest(const std::string& bytes);

// File helpers. Writes are atomic (temp file + rename).
void save_log(const GameLog& log, const std::filesystem::path& path);
GameLog load_log(const std::filesystem::path& path);
Manifest load_manifest(const std::filesystem::path& path);
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

// Loads every *.json in the directory in lexicographic filename order.
// Unparseable files are reported in `errors` and skipped.
std::vector<GameLog> load_log_dir(const std::filesystem::path& dir,
                                  std::vector<std::string>* errors = nullptr);

}  // namespace island
