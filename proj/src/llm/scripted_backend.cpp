#include "hypoflow/llm/scripted_backend.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hypoflow/core/error.hpp"

namespace hypoflow::llm {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, path.string(), "cannot read fixture file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Fixtures fixtures_from_json(const json& doc, const std::filesystem::path& base_dir) {
  const json& replies = doc.contains("replies") ? doc.at("replies") : doc;
  if (!replies.is_object()) throw Error(ErrorCode::InvalidConfig, "replies", "fixture replies must be an object");
  Fixtures out;
  for (const auto& [role, list] : replies.items()) {
    if (!list.is_array()) throw Error(ErrorCode::InvalidConfig, role, "fixture list expected");
    int index = 0;
    for (const auto& entry : list) {
      std::string text;
      if (entry.is_string()) {
        text = entry.get<std::string>();
      } else if (entry.is_object() && entry.contains("file")) {
        text = slurp(base_dir / entry.at("file").get<std::string>());
      } else if (entry.is_object() && entry.contains("text")) {
        text = entry.at("text").get<std::string>();
      } else {
        throw Error(ErrorCode::InvalidConfig, role, "fixture entry must be a string, {file} or {text}");
      }
      out.emplace(FixtureKey{role, index++}, std::move(text));
    }
  }
  return out;
}

Fixtures load_fixtures(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(slurp(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string(), e.what());
  }
  return fixtures_from_json(doc, path.parent_path());
}

ScriptedBackend::ScriptedBackend(Fixtures fixtures) : fixtures_(std::move(fixtures)) {}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  int& cursor = cursors_[request.agent_role];
  const int index = request.call_index.value_or(cursor);
  cursor = std::max(cursor, index + 1);
  log_.push_back(RecordedCall{request.agent_role, index, request});

  auto it = fixtures_.find(FixtureKey{request.agent_role, index});
  if (it == fixtures_.end())
    throw Error(ErrorCode::FixtureMiss, request.agent_role + ":" + std::to_string(index),
                "no scripted reply for this role and call index");

  ChatResponse response;
  response.text = it->second;
  response.transcript = build_transcript(request, response.text);
  response.backend_tag = BackendTag::Scripted;
  return response;
}

std::vector<RecordedCall> ScriptedBackend::call_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

}  // namespace hypoflow::llm
