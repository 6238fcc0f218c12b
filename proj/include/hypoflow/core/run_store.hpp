#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypoflow/core/config.hpp"
#include "hypoflow/core/run_state.hpp"
#include "hypoflow/core/types.hpp"

namespace hypoflow {

// File helpers shared by every module that writes into a run directory.
std::string read_text(const fs::path& path);
json read_json(const fs::path& path);
// Writes via a temporary sibling and rename so readers never see a torn file.
void write_text_atomic(const fs::path& path, std::string_view content);
void write_json_atomic(const fs::path& path, const json& value);

// Canonical run layout. All names are fixed; see docs/run_layout.md.
class RunStore {
 public:
  explicit RunStore(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const noexcept { return root_; }
  std::string run_id() const { return root_.filename().string(); }

  fs::path config_path() const { return root_ / "config.json"; }
  fs::path query_path() const { return root_ / "query.json"; }
  fs::path idea_path() const { return root_ / "idea.json"; }
  fs::path run_record_path() const { return root_ / "run_record.json"; }
  fs::path lock_path() const { return root_ / ".lock"; }
  fs::path rounds_dir() const { return root_ / "rounds"; }
  fs::path round_dir(int index) const { return rounds_dir() / ("round_" + std::to_string(index)); }
  fs::path transcripts_dir() const { return root_ / "transcripts"; }
  fs::path transcript_path(std::string_view role, int index) const;
  fs::path plots_dir() const { return root_ / "plots"; }
  fs::path report_dir() const { return root_ / "report"; }

  bool is_run_directory() const;

  ResearchQuery load_query() const;
  json load_config_document() const;

  void save_idea(const ResearchIdea& idea) const;
  std::optional<ResearchIdea> load_idea() const;

  // Round directories present on disk, ascending.
  std::vector<int> round_indices() const;
  // True when the three round artifacts exist and both JSON files parse.
  bool round_complete(int index) const;

  // Next unused per-role call index, derived from transcripts/ so resumed runs
  // continue numbering where the previous process stopped.
  int next_call_index(std::string_view role) const;
  // Final assistant message of the latest transcript for `role`, if any.
  std::optional<std::string> latest_reply(std::string_view role) const;

 private:
  fs::path root_;
};

// Exclusive advisory lock on <run>/.lock held for the lifetime of the object.
class RunLock {
 public:
  explicit RunLock(const fs::path& lock_file);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  int fd_ = -1;
};

struct RunHandle {
  RunStore store;
  RunConfig config;
  ResearchQuery query;
  RunState state;
  std::unique_ptr<RunLock> lock;

  int n_test() const { return state.n_test; }
};

// "<UTC timestamp>-<6 hex chars>"
std::string make_run_id();

// The follow-up budget of a run: the query's n_test when given, else the
// config's.
int effective_n_test(const RunConfig& config, const ResearchQuery& query);

// Creates <workspace>/<run_id>/ with config.json, query.json, rounds/ and
// transcripts/; the returned handle is locked and in Ideation.
// `extra_config` is merged into config.json (provenance such as prompt hashes).
RunHandle new_run(const RunConfig& config, const ResearchQuery& query, std::optional<std::string> run_id = {},
                  const json& extra_config = json::object());

// Reopens an existing run, taking the lock and re-deriving its state from the
// directory contents.
RunHandle open_run(const fs::path& run_dir, std::optional<RunConfig> config_override = {});

// Stage re-derivation used by resume and inspect (no state file is kept).
RunState derive_state(const RunStore& store, int n_test);

}  // namespace hypoflow
