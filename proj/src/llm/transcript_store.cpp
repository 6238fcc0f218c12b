#include "hypoflow/llm/transcript_store.hpp"

#include <system_error>

#include "hypoflow/core/error.hpp"

namespace hypoflow::llm {

json transcript_document(std::string_view role, int index, const ChatRequest& request, const ChatResponse& response) {
  json doc{{"role", std::string(role)},
           {"index", index},
           {"model", request.model},
           {"temperature", request.temperature},
           {"backend", std::string(to_string(response.backend_tag))},
           {"messages", response.transcript}};
  if (request.reasoning_effort) doc["reasoning_effort"] = *request.reasoning_effort;
  if (response.usage) {
    doc["usage"] = json{{"prompt_tokens", response.usage->prompt_tokens},
                        {"completion_tokens", response.usage->completion_tokens},
                        {"total_tokens", response.usage->total_tokens}};
  } else {
    doc["usage"] = nullptr;
  }
  return doc;
}

std::filesystem::path record_transcript(const RunStore& store, std::string_view role, int index,
                                        const ChatRequest& request, const ChatResponse& response) {
  const auto path = store.transcript_path(role, index);
  const auto content = transcript_document(role, index, request, response).dump(2) + "\n";
  if (!std::filesystem::is_directory(store.transcripts_dir())) {
    std::error_code ec;
    std::filesystem::create_directories(store.transcripts_dir(), ec);
    if (ec) throw Error(ErrorCode::StoreUnwritable, store.transcripts_dir().string(), ec.message());
  }
  if (std::filesystem::exists(path)) {
    if (read_text(path) == content) return path;
    throw Error(ErrorCode::ConflictError, path.filename().string(), "transcript already recorded with other content");
  }
  write_text_atomic(path, content);
  return path;
}

Transcript load_transcript(const std::filesystem::path& path) {
  return read_json(path).at("messages").get<Transcript>();
}

}  // namespace hypoflow::llm
