#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "hypoflow/llm/backend.hpp"

namespace hypoflow::llm {

// (agent role, per-role call index) -> reply text
using FixtureKey = std::pair<std::string, int>;
using Fixtures = std::map<FixtureKey, std::string>;

// Reads a fixture document:
//   {"replies": {"Scientist_1": ["inline text", {"file": "a.md"}, {"text": "..."}], ...}}
// `file` entries are resolved relative to the fixture document.
Fixtures load_fixtures(const std::filesystem::path& path);
Fixtures fixtures_from_json(const json& doc, const std::filesystem::path& base_dir);

struct RecordedCall {
  std::string role;
  int index = 0;
  ChatRequest request;
};

// Deterministic backend serving pre-authored replies. Requests carrying an
// explicit call_index are served that fixture; otherwise a per-role cursor
// picks the next one. Every request is appended to the call log.
class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(Fixtures fixtures);

  ChatResponse complete(const ChatRequest& request) override;

  std::vector<RecordedCall> call_log() const;
  const Fixtures& fixtures() const noexcept { return fixtures_; }

 private:
  Fixtures fixtures_;
  mutable std::mutex mutex_;
  std::map<std::string, int> cursors_;
  std::vector<RecordedCall> log_;
};

}  // namespace hypoflow::llm
