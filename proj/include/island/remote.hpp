#pragma once

#include <memory>
#include <optional>
#include <string>

#include "island/agents.hpp"

namespace island {

// Chat-completions style HTTP backend. The request body is
//   {"model": ..., "messages": [{"role", "content"}...], "max_tokens": ...}
// and the reply text is read from choices[0].message.content. The API key
// is taken from the named environment variable and sent as a bearer token.
struct RemoteConfig {
  std::string endpoint_url;  // full URL, e.g. https://host/v1/chat/completions
  std::string api_key_env = "ISLAND_API_KEY";
  int max_tokens = 1024;
  std::optional<double> temperature;  // passthrough only

  int max_retries = 3;
  double backoff_base_s = 1.0;
  double backoff_cap_s = 30.0;
  double timeout_s = 120.0;
  int max_concurrency = 4;
};

class RemoteBackend : public AgentBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);
  ~RemoteBackend() override;

  // Retries transport errors, 429 and 5xx with capped exponential backoff,
  // then throws std::runtime_error with the last failure.
  std::string respond(const PromptContext& ctx) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace island
