#pragma once

#include <filesystem>
#include <string_view>

#include "hypoflow/core/run_store.hpp"
#include "hypoflow/llm/chat.hpp"

namespace hypoflow::llm {

// Serialized form of one call:
//   {role, index, model, temperature, [reasoning_effort], backend, messages, usage}
json transcript_document(std::string_view role, int index, const ChatRequest& request, const ChatResponse& response);

// Writes transcripts/<role>_<index>.json. Rewriting identical bytes is a
// no-op; different content under an existing key throws ConflictError.
std::filesystem::path record_transcript(const RunStore& store, std::string_view role, int index,
                                        const ChatRequest& request, const ChatResponse& response);

Transcript load_transcript(const std::filesystem::path& path);

}  // namespace hypoflow::llm
