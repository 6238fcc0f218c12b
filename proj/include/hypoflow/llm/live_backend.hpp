#pragma once

#include <chrono>
#include <string>

#include "hypoflow/llm/backend.hpp"

namespace hypoflow::llm {

struct LiveSettings {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  int max_attempts = 3;
  std::chrono::duration<double> initial_backoff{1.0};
  std::chrono::duration<double> request_timeout{600.0};
};

// OpenAI-style chat-completions client. Transport failures and 5xx replies
// are retried with exponential backoff (initial, 2x initial, ...) up to
// max_attempts; any other non-200 status is a BackendRefused and is not
// retried.
class LiveBackend final : public Backend {
 public:
  explicit LiveBackend(LiveSettings settings);

  ChatResponse complete(const ChatRequest& request) override;

  // The JSON body sent for `request`. Exposed for tests.
  static json request_body(const ChatRequest& request);

 private:
  LiveSettings settings_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // e.g. "/v1"
};

}  // namespace hypoflow::llm
