#include "island/remote.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "island/http.hpp"
#include "json.hpp"

namespace island {

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("remote endpoint must be an http(s) URL: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

// Simple counting gate; std::counting_semaphore's compile-time max does not
// fit a runtime-configured cap cleanly.
class ConcurrencyGate {
 public:
  explicit ConcurrencyGate(int slots) : slots_(slots > 0 ? slots : 1) {}
  void acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [this] { return slots_ > 0; });
    --slots_;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++slots_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int slots_;
};

}  // namespace

struct RemoteBackend::Impl {
  RemoteConfig config;
  ParsedUrl url;
  std::string api_key;
  ConcurrencyGate gate;

  explicit Impl(RemoteConfig cfg)
      : config(std::move(cfg)), url(split_url(config.endpoint_url)),
        gate(config.max_concurrency) {
    if (const char* key = std::getenv(config.api_key_env.c_str())) api_key = key;
  }

  std::string post_once(const std::string& body, std::string& error) {
    httplib::Client client(url.base);
    auto seconds = static_cast<time_t>(config.timeout_s);
    auto micros = static_cast<long>((config.timeout_s - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    auto result = client.Post(url.path, headers, body, "application/json");
    if (!result) {
      error = "transport error: " + httplib::to_string(result.error());
      return "";
    }
    if (result->status != 200) {
      error = "http status " + std::to_string(result->status);
      if (retryable_status(result->status)) return "";
      throw std::runtime_error("remote backend: " + error + ": " + result->body);
    }
    try {
      auto j = nlohmann::json::parse(result->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(std::string("remote backend: unexpected response shape: ") +
                               e.what());
    }
  }
};

RemoteBackend::RemoteBackend(RemoteConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

RemoteBackend::~RemoteBackend() = default;

std::string RemoteBackend::respond(const PromptContext& ctx) {
  nlohmann::json body;
  body["model"] = ctx.model.id();
  auto messages = nlohmann::json::array();
  for (const auto& message : ctx.messages) {
    messages.push_back({{"role", to_string(message.role)}, {"content", message.text}});
  }
  body["messages"] = messages;
  body["max_tokens"] = impl_->config.max_tokens;
  if (impl_->config.temperature) body["temperature"] = *impl_->config.temperature;
  const std::string payload = body.dump();

  impl_->gate.acquire();
  struct Release {
    ConcurrencyGate& gate;
    ~Release() { gate.release(); }
  } release{impl_->gate};

  std::string last_error = "no attempts made";
  const int attempts = impl_->config.max_retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      double delay = impl_->config.backoff_base_s * std::pow(2.0, attempt - 1);
      delay = std::min(delay, impl_->config.backoff_cap_s);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    std::string error;
    std::string text = impl_->post_once(payload, error);
    if (error.empty()) return text;
    last_error = error;
  }
  throw std::runtime_error("remote backend: retries exhausted for " + ctx.player + " (" +
                           to_string(ctx.phase) + "): " + last_error);
}

}  // namespace island
