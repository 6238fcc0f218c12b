#pragma once

#include "hypoflow/llm/chat.hpp"

namespace hypoflow::llm {

class Backend {
 public:
  virtual ~Backend() = default;

  // Implementations must be safe to call from several threads.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// Validates the request, then dispatches to the backend. The returned
// transcript always ends with the assistant reply.
ChatResponse complete(Backend& backend, const ChatRequest& request);

}  // namespace hypoflow::llm
