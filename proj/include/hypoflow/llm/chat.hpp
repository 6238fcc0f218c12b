#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hypoflow::llm {

using json = nlohmann::json;

enum class MessageRole { System, User, Assistant };

std::string_view to_string(MessageRole role);
MessageRole message_role_from_string(std::string_view text);

struct ChatMessage {
  MessageRole role = MessageRole::User;
  std::string content;
  // Image file paths; only the Plot_Analyzer sends these.
  std::vector<std::string> attachments;

  bool operator==(const ChatMessage&) const = default;
};

using Transcript = std::vector<ChatMessage>;

void to_json(json& j, const ChatMessage& m);
void from_json(const json& j, ChatMessage& m);

struct ChatRequest {
  // Routing metadata. Not sent to a live model; the scripted backend keys
  // fixtures on (agent_role, call_index).
  std::string agent_role;
  std::optional<int> call_index;

  std::string system_message;
  std::string prompt;
  std::vector<std::string> prompt_attachments;
  std::string model;
  double temperature = 0.0;
  std::optional<std::string> reasoning_effort;
  Transcript msg_history;

  // Throws Error(InvalidRequest) when an invariant is broken.
  void validate() const;
};

struct Usage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
  long total_tokens = 0;

  bool operator==(const Usage&) const = default;
};

enum class BackendTag { Live, Scripted };

std::string_view to_string(BackendTag tag);

struct ChatResponse {
  std::string text;
  Transcript transcript;
  std::optional<Usage> usage;
  BackendTag backend_tag = BackendTag::Scripted;
};

// msg_history ++ [system (only when history is empty), user prompt]
Transcript outgoing_messages(const ChatRequest& request);

// outgoing_messages(request) ++ [assistant reply]
Transcript build_transcript(const ChatRequest& request, const std::string& reply);

}  // namespace hypoflow::llm
