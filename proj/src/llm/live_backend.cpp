#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "hypoflow/llm/live_backend.hpp"

#include <httplib.h>

#include <fstream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "hypoflow/core/error.hpp"

namespace hypoflow::llm {

namespace {

std::string mime_type_for(const std::string& path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".png")) return "image/png";
  if (ends_with(".jpg") || ends_with(".jpeg")) return "image/jpeg";
  if (ends_with(".pdf")) return "application/pdf";
  return "application/octet-stream";
}

std::string read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidRequest, path, "cannot read attachment");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json encode_message(const ChatMessage& m) {
  if (m.attachments.empty()) return json{{"role", std::string(to_string(m.role))}, {"content", m.content}};
  json parts = json::array();
  if (!m.content.empty()) parts.push_back({{"type", "text"}, {"text", m.content}});
  for (const auto& path : m.attachments) {
    const auto url = "data:" + mime_type_for(path) + ";base64," + httplib::detail::base64_encode(read_binary(path));
    parts.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
  }
  return json{{"role", std::string(to_string(m.role))}, {"content", parts}};
}

}  // namespace

LiveBackend::LiveBackend(LiveSettings settings) : settings_(std::move(settings)) {
  const auto& url = settings_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidConfig, "backend.base_url", "missing scheme");
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

json LiveBackend::request_body(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : outgoing_messages(request)) messages.push_back(encode_message(m));
  json body{{"model", request.model}, {"messages", messages}, {"temperature", request.temperature}};
  if (request.reasoning_effort) body["reasoning_effort"] = *request.reasoning_effort;
  return body;
}

ChatResponse LiveBackend::complete(const ChatRequest& request) {
  const auto body = request_body(request).dump();
  const auto endpoint = path_prefix_ + "/chat/completions";
  httplib::Headers headers{{"Authorization", "Bearer " + settings_.api_key}};

  auto backoff = settings_.initial_backoff;
  std::string last_failure;
  for (int attempt = 1; attempt <= settings_.max_attempts; ++attempt) {
    httplib::Client client(origin_);
    const auto timeout = std::chrono::duration_cast<std::chrono::milliseconds>(settings_.request_timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    client.set_connection_timeout(std::chrono::seconds(30));

    auto res = client.Post(endpoint, headers, body, "application/json");
    if (!res) {
      last_failure = "transport: " + httplib::to_string(res.error());
    } else if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
    } else if (res->status != 200) {
      throw Error(ErrorCode::BackendRefused, std::to_string(res->status), res->body.substr(0, 500));
    } else {
      json doc;
      try {
        doc = json::parse(res->body);
        ChatResponse response;
        response.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        if (doc.contains("usage") && doc.at("usage").is_object()) {
          const auto& u = doc.at("usage");
          response.usage = Usage{u.value("prompt_tokens", 0L), u.value("completion_tokens", 0L),
                                 u.value("total_tokens", 0L)};
        }
        response.transcript = build_transcript(request, response.text);
        response.backend_tag = BackendTag::Live;
        return response;
      } catch (const json::exception& e) {
        throw Error(ErrorCode::ProtocolError, request.agent_role, std::string("malformed completion: ") + e.what());
      }
    }
    spdlog::warn("{} call attempt {}/{} failed ({})", request.agent_role, attempt, settings_.max_attempts,
                 last_failure);
    if (attempt < settings_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::TransportError, request.agent_role, last_failure);
}

}  // namespace hypoflow::llm
