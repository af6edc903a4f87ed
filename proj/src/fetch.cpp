#include "island/fetch.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "island/http.hpp"
#include "island/serialization.hpp"

namespace island {

namespace {

bool is_http(const std::string& uri) {
  return uri.rfind("http://", 0) == 0 || uri.rfind("https://", 0) == 0;
}

std::string read_local(const std::string& uri) {
  std::string path = uri;
  if (path.rfind("file://", 0) == 0) path = path.substr(7);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

std::string read_http(const std::string& uri, const FetchOptions& options) {
  auto scheme_end = uri.find("://");
  auto path_start = uri.find('/', scheme_end + 3);
  std::string base = path_start == std::string::npos ? uri : uri.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : uri.substr(path_start);

  std::string last_error;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (attempt > 0) {
      double delay = options.backoff_base_s * std::pow(2.0, attempt - 1);
      delay = std::min(delay, options.backoff_cap_s);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    httplib::Client client(base);
    auto seconds = static_cast<time_t>(options.timeout_s);
    client.set_connection_timeout(seconds, 0);
    client.set_read_timeout(seconds, 0);
    auto result = client.Get(path);
    if (result && result->status == 200) return result->body;
    if (result) {
      last_error = "http status " + std::to_string(result->status);
      if (result->status >= 400 && result->status < 500 && result->status != 429) break;
    } else {
      last_error = "transport error: " + httplib::to_string(result.error());
    }
  }
  throw std::runtime_error(last_error);
}

}  // namespace

FetchSummary fetch_manifest_logs(const Manifest& manifest,
                                 const std::filesystem::path& dest,
                                 const FetchOptions& options) {
  namespace fs = std::filesystem;
  manifest.validate();
  fs::create_directories(dest);

  FetchSummary summary;
  for (const auto& entry : manifest.entries) {
    fs::path target = dest / (entry.game_id + ".json");
    try {
      if (fs::exists(target)) {
        try {
          if (load_log(target).game_id == entry.game_id) {
            ++summary.skipped;
            continue;
          }
        } catch (const std::exception&) {
          // unreadable or stale file: refetch below
        }
      }
      std::string bytes =
          is_http(entry.uri) ? read_http(entry.uri, options) : read_local(entry.uri);
      GameLog log = parse_game_log(bytes);
      if (log.game_id != entry.game_id) {
        throw std::runtime_error("id mismatch: manifest says " + entry.game_id +
                                 ", log says " + log.game_id);
      }
      atomic_write(target, bytes);
      ++summary.fetched;
    } catch (const std::exception& e) {
      ++summary.failed;
      summary.failures.emplace_back(entry.game_id, e.what());
    }
  }
  return summary;
}

}  // namespace island
