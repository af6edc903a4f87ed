#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "island/game_log.hpp"

namespace island {

struct FetchOptions {
  int max_retries = 3;
  double backoff_base_s = 1.0;
  double backoff_cap_s = 30.0;
  double timeout_s = 60.0;
};

struct FetchSummary {
  int fetched = 0;
  int skipped = 0;
  int failed = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // (game_id, reason)
};

// Downloads each manifest entry into dest as <game_id>.json. Entries whose
// file is already present with a matching game_id are skipped. Supports
// http(s):// URIs, file:// URIs and plain local paths. Fetched bytes must
// parse as a log whose game_id matches the entry. Failures are collected
// per entry; the batch never aborts early. Writes are atomic.
FetchSummary fetch_manifest_logs(const Manifest& manifest,
                                 const std::filesystem::path& dest,
                                 const FetchOptions& options = {});

}  // namespace island
