#include "hypoflow/sandbox/process.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/prctl.h>
#include <sys/resource.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>
#include <thread>

#include "hypoflow/core/error.hpp"

#ifndef CLOSE_RANGE_CLOEXEC
#define CLOSE_RANGE_CLOEXEC (1U << 2)
#endif

namespace hypoflow::sandbox {

void UniqueFd::reset() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

std::optional<fs::path> find_program(const std::string& program, const std::string& search_path) {
  if (program.find('/') != std::string::npos) {
    if (::access(program.c_str(), X_OK) == 0) return fs::path(program);
    return std::nullopt;
  }
  std::istringstream dirs(search_path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) continue;
    auto candidate = fs::path(dir) / program;
    if (::access(candidate.c_str(), X_OK) == 0 && fs::is_regular_file(candidate)) return candidate;
  }
  return std::nullopt;
}

namespace {

std::string env_value(const std::vector<std::string>& env, const std::string& name) {
  const auto prefix = name + "=";
  for (const auto& kv : env) {
    if (kv.rfind(prefix, 0) == 0) return kv.substr(prefix.size());
  }
  return {};
}

[[noreturn]] void child_fail(int report_fd, int err) {
  (void)!::write(report_fd, &err, sizeof err);
  ::_exit(127);
}

int decode_status(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return 1;
}

}  // namespace

ProcessResult run_process(const ProcessSpec& spec) {
  if (spec.argv.empty()) throw Error(ErrorCode::SpawnFailure, "", "empty command line");
  const auto program = find_program(spec.argv[0], env_value(spec.env, "PATH"));
  if (!program) throw Error(ErrorCode::SpawnFailure, spec.argv[0], "program not found");

  // Everything the child touches is prepared before fork.
  const std::string program_path = program->string();
  std::vector<char*> argv;
  for (const auto& a : spec.argv) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  std::vector<char*> envp;
  for (const auto& e : spec.env) envp.push_back(const_cast<char*>(e.c_str()));
  envp.push_back(nullptr);

  UniqueFd out(::open(spec.stdout_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
  UniqueFd err(::open(spec.stderr_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
  UniqueFd null_in(::open("/dev/null", O_RDONLY | O_CLOEXEC));
  if (!out || !err || !null_in) throw Error(ErrorCode::SpawnFailure, spec.argv[0], "cannot open log files");

  int report[2];
  if (::pipe2(report, O_CLOEXEC) != 0) throw Error(ErrorCode::SpawnFailure, spec.argv[0], std::strerror(errno));
  UniqueFd report_read(report[0]);
  UniqueFd report_write(report[1]);

  const auto started = std::chrono::steady_clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorCode::SpawnFailure, spec.argv[0], std::strerror(errno));

  if (pid == 0) {
    const int wfd = report_write.get();
    ::setpgid(0, 0);
    if (::dup2(null_in.get(), STDIN_FILENO) < 0 || ::dup2(out.get(), STDOUT_FILENO) < 0 ||
        ::dup2(err.get(), STDERR_FILENO) < 0)
      child_fail(wfd, errno);
    if (::chdir(spec.cwd.c_str()) != 0) child_fail(wfd, errno);
    rlimit core{0, 0};
    ::setrlimit(RLIMIT_CORE, &core);
    if (spec.cpu_seconds) {
      rlimit cpu{*spec.cpu_seconds, *spec.cpu_seconds + 1};
      ::setrlimit(RLIMIT_CPU, &cpu);
    }
    if (spec.file_size_bytes) {
      rlimit fsize{*spec.file_size_bytes, *spec.file_size_bytes};
      ::setrlimit(RLIMIT_FSIZE, &fsize);
    }
    if (spec.landlock_ruleset >= 0) {
      if (::prctl(PR_SET_NO_NEW_PRIVS, 1, 0, 0, 0) != 0) child_fail(wfd, errno);
      if (::syscall(__NR_landlock_restrict_self, spec.landlock_ruleset, 0U) != 0) child_fail(wfd, errno);
    }
    ::syscall(SYS_close_range, 3U, ~0U, CLOSE_RANGE_CLOEXEC);
    ::execve(program_path.c_str(), argv.data(), envp.data());
    child_fail(wfd, errno);
  }

  report_write.reset();
  int child_errno = 0;
  const auto n = ::read(report_read.get(), &child_errno, sizeof child_errno);
  if (n == sizeof child_errno) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    throw Error(ErrorCode::SpawnFailure, spec.argv[0], std::strerror(child_errno));
  }

  ProcessResult result;
  const auto deadline = started + std::chrono::duration_cast<std::chrono::steady_clock::duration>(spec.timeout);
  int status = 0;
  for (;;) {
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0 && errno != EINTR) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      result.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  // Reap stragglers the script left behind in its group.
  ::kill(-pid, SIGKILL);

  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  result.exit_status = result.timed_out ? kTimeoutExitStatus : decode_status(status);
  return result;
}

}  // namespace hypoflow::sandbox
