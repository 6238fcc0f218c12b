#include "hypoflow/llm/chat.hpp"

#include "hypoflow/core/error.hpp"
#include "hypoflow/core/types.hpp"
#include "hypoflow/llm/backend.hpp"

namespace hypoflow::llm {

std::string_view to_string(MessageRole role) {
  switch (role) {
    case MessageRole::System: return "system";
    case MessageRole::User: return "user";
    case MessageRole::Assistant: return "assistant";
  }
  return "user";
}

MessageRole message_role_from_string(std::string_view text) {
  if (text == "system") return MessageRole::System;
  if (text == "user") return MessageRole::User;
  if (text == "assistant") return MessageRole::Assistant;
  throw Error(ErrorCode::InvalidRequest, std::string(text), "unknown message role");
}

std::string_view to_string(BackendTag tag) { return tag == BackendTag::Live ? "live" : "scripted"; }

void to_json(json& j, const ChatMessage& m) {
  j = json{{"role", std::string(to_string(m.role))}, {"content", m.content}};
  if (!m.attachments.empty()) j["attachments"] = m.attachments;
}

void from_json(const json& j, ChatMessage& m) {
  m.role = message_role_from_string(j.at("role").get<std::string>());
  m.content = j.at("content").get<std::string>();
  m.attachments = j.value("attachments", std::vector<std::string>{});
}

void ChatRequest::validate() const {
  if (trim(system_message).empty()) throw Error(ErrorCode::InvalidRequest, agent_role, "empty system message");
  if (trim(prompt).empty()) throw Error(ErrorCode::InvalidRequest, agent_role, "empty prompt");
  if (!(temperature >= 0.0 && temperature <= 2.0))
    throw Error(ErrorCode::InvalidRequest, agent_role, "temperature outside [0, 2]");
  if (!msg_history.empty() && msg_history.front().role != MessageRole::System)
    throw Error(ErrorCode::InvalidRequest, agent_role, "history must begin with a system message");
  for (const auto& m : msg_history) {
    if (m.content.empty() && m.attachments.empty())
      throw Error(ErrorCode::InvalidRequest, agent_role, "history contains an empty message");
  }
}

Transcript outgoing_messages(const ChatRequest& request) {
  Transcript out = request.msg_history;
  if (out.empty()) out.push_back(ChatMessage{MessageRole::System, request.system_message, {}});
  out.push_back(ChatMessage{MessageRole::User, request.prompt, request.prompt_attachments});
  return out;
}

Transcript build_transcript(const ChatRequest& request, const std::string& reply) {
  Transcript out = outgoing_messages(request);
  out.push_back(ChatMessage{MessageRole::Assistant, reply, {}});
  return out;
}

ChatResponse complete(Backend& backend, const ChatRequest& request) {
  request.validate();
  auto response = backend.complete(request);
  if (response.transcript.empty() || response.transcript.back().role != MessageRole::Assistant ||
      response.transcript.back().content != response.text) {
    throw Error(ErrorCode::ProtocolError, request.agent_role, "backend returned an inconsistent transcript");
  }
  return response;
}

}  // namespace hypoflow::llm
