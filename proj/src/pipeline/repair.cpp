#include "hypoflow/pipeline/repair.hpp"

#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "hypoflow/core/error.hpp"

namespace hypoflow::pipeline {

namespace {

bool is_attempt_dir(const fs::directory_entry& entry) {
  return entry.is_directory() && entry.path().filename().string().rfind("attempt_", 0) == 0;
}

}  // namespace

fs::path archive_attempt(const fs::path& dir) {
  std::vector<fs::path> movable;
  int attempts = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (is_attempt_dir(entry))
      ++attempts;
    else
      movable.push_back(entry.path());
  }
  if (movable.empty()) return {};
  auto target = dir / ("attempt_" + std::to_string(attempts));
  while (fs::exists(target)) target = dir / ("attempt_" + std::to_string(++attempts));
  fs::create_directory(target);
  for (const auto& path : movable) fs::rename(path, target / path.filename());
  return target;
}

std::string log_tail(const fs::path& path, std::size_t max_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  auto text = buf.str();
  if (text.size() > max_bytes) text = "...\n" + text.substr(text.size() - max_bytes);
  return text;
}

ExecutionOutcome execute_with_repair(agents::AgentRunner& agents, sandbox::ScriptRunner& runner, ExecutionJob job) {
  ExecutionOutcome outcome;
  outcome.script = job.script;
  fs::create_directories(job.work_dir);
  archive_attempt(job.work_dir);

  for (;;) {
    outcome.record = runner.run(outcome.script, job.work_dir, job.env);
    std::optional<Error> failure;
    if (outcome.record.timed_out) {
      failure = Error(ErrorCode::Timeout, job.work_dir.filename().string(), "script exceeded its time limit");
    } else if (outcome.record.exit_status != 0) {
      failure = Error(ErrorCode::ScriptFailed, job.work_dir.filename().string(),
                      "exit status " + std::to_string(outcome.record.exit_status));
    } else if (job.verify) {
      try {
        job.verify(job.work_dir);
      } catch (const Error& e) {
        failure = e;
      }
    }
    if (!failure) return outcome;

    if (outcome.repairs >= job.max_repairs || job.repairer == nullptr) throw *failure;
    spdlog::warn("{}; requesting a repair from {}", failure->what(), job.repairer->role);

    auto bindings = job.bindings;
    bindings["code"] = outcome.script.body;
    bindings["stderr"] = log_tail(outcome.record.stderr_path);
    bindings["failure"] = failure->what();
    archive_attempt(job.work_dir);

    auto repair = agents.run_reflection(*job.repairer, job.partner_transcript, bindings, {},
                                        agents::PromptVariant::Repair);
    if (repair.decision != agents::ReflectionDecision::Revised)
      throw Error(ErrorCode::RepairFailed, job.repairer->role, "repair reply carried no corrected script");
    outcome.script = sandbox::ScriptSource{repair.payload, "", job.repairer->role + "#" + std::to_string(repair.call_index)};
    ++outcome.repairs;
  }
}

}  // namespace hypoflow::pipeline
