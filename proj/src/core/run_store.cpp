#include "hypoflow/core/run_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "hypoflow/core/error.hpp"

namespace hypoflow {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingArtifact, path.filename().string(), "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json(const fs::path& path) {
  const auto text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedArtifact, path.filename().string(), e.what());
  }
}

void write_text_atomic(const fs::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::StoreUnwritable, path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::StoreUnwritable, path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::StoreUnwritable, path.string(), ec.message());
}

void write_json_atomic(const fs::path& path, const json& value) { write_text_atomic(path, value.dump(2) + "\n"); }

fs::path RunStore::transcript_path(std::string_view role, int index) const {
  return transcripts_dir() / (std::string(role) + "_" + std::to_string(index) + ".json");
}

bool RunStore::is_run_directory() const {
  return fs::is_regular_file(config_path()) && fs::is_regular_file(query_path());
}

ResearchQuery RunStore::load_query() const { return read_json(query_path()).get<ResearchQuery>(); }

json RunStore::load_config_document() const { return read_json(config_path()); }

void RunStore::save_idea(const ResearchIdea& idea) const { write_json_atomic(idea_path(), json(idea)); }

std::optional<ResearchIdea> RunStore::load_idea() const {
  if (!fs::exists(idea_path())) return std::nullopt;
  return read_json(idea_path()).get<ResearchIdea>();
}

std::vector<int> RunStore::round_indices() const {
  std::vector<int> out;
  if (!fs::is_directory(rounds_dir())) return out;
  for (const auto& entry : fs::directory_iterator(rounds_dir())) {
    if (!entry.is_directory()) continue;
    const auto name = entry.path().filename().string();
    constexpr std::string_view prefix = "round_";
    if (name.rfind(prefix, 0) != 0) continue;
    const auto digits = name.substr(prefix.size());
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
    out.push_back(std::stoi(digits));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool RunStore::round_complete(int index) const {
  const auto dir = round_dir(index);
  if (!fs::is_regular_file(dir / "notes.txt")) return false;
  for (const char* name : {"results.json", "final_results.json"}) {
    if (!fs::is_regular_file(dir / name)) return false;
    std::ifstream in(dir / name);
    if (!json::accept(in)) return false;
  }
  return true;
}

namespace {

// Indices of transcripts/<role>_<n>.json, ascending.
std::vector<int> transcript_indices(const RunStore& store, std::string_view role) {
  std::vector<int> out;
  if (!fs::is_directory(store.transcripts_dir())) return out;
  const std::string prefix = std::string(role) + "_";
  for (const auto& entry : fs::directory_iterator(store.transcripts_dir())) {
    const auto name = entry.path().filename().string();
    if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".json") continue;
    const auto digits = name.substr(prefix.size(), name.size() - prefix.size() - 5);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
    out.push_back(std::stoi(digits));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int RunStore::next_call_index(std::string_view role) const {
  auto indices = transcript_indices(*this, role);
  return indices.empty() ? 0 : indices.back() + 1;
}

std::optional<std::string> RunStore::latest_reply(std::string_view role) const {
  auto indices = transcript_indices(*this, role);
  if (indices.empty()) return std::nullopt;
  const auto doc = read_json(transcript_path(role, indices.back()));
  const auto& messages = doc.at("messages");
  if (messages.empty()) return std::nullopt;
  return messages.back().at("content").get<std::string>();
}

RunLock::RunLock(const fs::path& lock_file) {
  fd_ = ::open(lock_file.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorCode::WorkspaceUnwritable, lock_file.string(), "cannot create lock file");
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(ErrorCode::RunLocked, lock_file.parent_path().string(), "another process owns this run");
  }
}

RunLock::~RunLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

std::string make_run_id() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&t, &utc);
  std::random_device rd;
  std::uniform_int_distribution<unsigned> dist(0, 0xFFFFFF);
  std::ostringstream out;
  out << std::put_time(&utc, "%Y%m%dT%H%M%SZ") << "-" << std::hex << std::setw(6) << std::setfill('0') << dist(rd);
  return out.str();
}

int effective_n_test(const RunConfig& config, const ResearchQuery& query) {
  return query.n_test.value_or(config.n_test);
}

RunHandle new_run(const RunConfig& config, const ResearchQuery& query, std::optional<std::string> run_id,
                  const json& extra_config) {
  query.validate();
  const auto id = run_id.value_or(make_run_id());
  const auto root = config.workspace / id;
  std::error_code ec;
  fs::create_directories(config.workspace, ec);
  if (ec || !fs::is_directory(config.workspace))
    throw Error(ErrorCode::WorkspaceUnwritable, config.workspace.string(), ec.message());
  if (fs::exists(root)) throw Error(ErrorCode::RunAlreadyExists, id);
  if (!fs::create_directory(root, ec) || ec) {
    if (fs::exists(root) && !ec) throw Error(ErrorCode::RunAlreadyExists, id);
    throw Error(ErrorCode::WorkspaceUnwritable, config.workspace.string(), ec.message());
  }

  RunHandle handle{RunStore(root), config, query, RunState::initial(effective_n_test(config, query)), nullptr};
  handle.lock = std::make_unique<RunLock>(handle.store.lock_path());
  try {
    fs::create_directory(handle.store.rounds_dir());
    fs::create_directory(handle.store.transcripts_dir());
    json config_doc = config_to_json(config);
    for (const auto& [key, value] : extra_config.items()) config_doc[key] = value;
    write_json_atomic(handle.store.config_path(), config_doc);
    write_json_atomic(handle.store.query_path(), json(query));
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::WorkspaceUnwritable, root.string(), e.what());
  }
  return handle;
}

RunHandle open_run(const fs::path& run_dir, std::optional<RunConfig> config_override) {
  RunStore store(run_dir);
  if (!store.is_run_directory()) throw Error(ErrorCode::NotARunDirectory, run_dir.string());
  auto lock = std::make_unique<RunLock>(store.lock_path());
  auto config = config_override ? *config_override : validate_config(store.load_config_document(), run_dir);
  auto query = store.load_query();
  const int n_test = effective_n_test(config, query);
  auto state = derive_state(store, n_test);
  return RunHandle{std::move(store), std::move(config), std::move(query), state, std::move(lock)};
}

RunState derive_state(const RunStore& store, int n_test) {
  RunState state = RunState::initial(n_test);
  if (fs::exists(store.run_record_path()) && fs::exists(store.report_dir() / "main.tex")) {
    const auto record = read_json(store.run_record_path());
    if (record.contains("status") && record.at("status").value("stage", "") == "Done") {
      state = record.at("status").get<RunState>();
      return state;
    }
  }
  if (!fs::exists(store.idea_path())) return state;
  state.stage = Stage::InitialTesting;
  if (!store.round_complete(0)) return state;

  int last = 0;
  while (last + 1 <= n_test && store.round_complete(last + 1)) ++last;
  state.stage = Stage::Refinement;
  state.refinement_round = last;
  state.rounds_completed = last + 1;

  const bool documentation_started = fs::exists(store.plots_dir()) || fs::exists(store.report_dir());
  const auto verdict = store.latest_reply("Refiner_2");
  const bool halted = verdict && verdict->find("NO_FOLLOWUP") != std::string::npos;
  if (documentation_started || halted) state.stage = Stage::Documentation;
  return state;
}

}  // namespace hypoflow
