#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hypoflow::sandbox {

namespace fs = std::filesystem;

class UniqueFd {
 public:
  UniqueFd() = default;
  explicit UniqueFd(int fd) : fd_(fd) {}
  ~UniqueFd() { reset(); }
  UniqueFd(UniqueFd&& other) noexcept : fd_(other.release()) {}
  UniqueFd& operator=(UniqueFd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = other.release();
    }
    return *this;
  }
  UniqueFd(const UniqueFd&) = delete;
  UniqueFd& operator=(const UniqueFd&) = delete;

  int get() const noexcept { return fd_; }
  explicit operator bool() const noexcept { return fd_ >= 0; }
  int release() noexcept {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void reset();

 private:
  int fd_ = -1;
};

struct ProcessSpec {
  std::vector<std::string> argv;  // argv[0] is resolved against PATH from `env`
  std::vector<std::string> env;   // "NAME=value", the complete child environment
  fs::path cwd;
  fs::path stdout_path;
  fs::path stderr_path;
  std::chrono::duration<double> timeout{600.0};
  std::optional<std::uint64_t> cpu_seconds;
  std::optional<std::uint64_t> file_size_bytes;
  // Landlock ruleset applied in the child right before exec; -1 for none.
  int landlock_ruleset = -1;
};

struct ProcessResult {
  int exit_status = 0;  // 124 on timeout, 128+signal when killed
  double wall_time = 0.0;
  bool timed_out = false;
};

inline constexpr int kTimeoutExitStatus = 124;

// Runs the child in its own process group with stdin from /dev/null and
// stdout/stderr redirected to files. On timeout, and after normal exit, the
// whole group is SIGKILLed. Throws SpawnFailure when the program cannot be
// started.
ProcessResult run_process(const ProcessSpec& spec);

// Locates `program` in a colon-separated search path; empty when absent.
std::optional<fs::path> find_program(const std::string& program, const std::string& search_path);

}  // namespace hypoflow::sandbox
