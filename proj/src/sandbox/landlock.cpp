#include "hypoflow/sandbox/landlock.hpp"

#include <fcntl.h>
#include <sys/syscall.h>
#include <unistd.h>

#include <cstdint>

#include <spdlog/spdlog.h>

namespace hypoflow::sandbox {

namespace {

// Kernel ABI structures, declared here because distribution headers lag the
// kernel.
struct RulesetAttr {
  std::uint64_t handled_access_fs;
  std::uint64_t handled_access_net;
};

struct __attribute__((packed)) PathBeneathAttr {
  std::uint64_t allowed_access;
  std::int32_t parent_fd;
};

constexpr std::uint32_t kCreateRulesetVersion = 1U << 0;
constexpr int kRulePathBeneath = 1;

constexpr std::uint64_t kFsWriteFile = 1ULL << 1;
constexpr std::uint64_t kFsRemoveDir = 1ULL << 4;
constexpr std::uint64_t kFsRemoveFile = 1ULL << 5;
constexpr std::uint64_t kFsMakeChar = 1ULL << 6;
constexpr std::uint64_t kFsMakeDir = 1ULL << 7;
constexpr std::uint64_t kFsMakeReg = 1ULL << 8;
constexpr std::uint64_t kFsMakeSock = 1ULL << 9;
constexpr std::uint64_t kFsMakeFifo = 1ULL << 10;
constexpr std::uint64_t kFsMakeBlock = 1ULL << 11;
constexpr std::uint64_t kFsMakeSym = 1ULL << 12;
constexpr std::uint64_t kFsRefer = 1ULL << 13;     // ABI 2
constexpr std::uint64_t kFsTruncate = 1ULL << 14;  // ABI 3

constexpr std::uint64_t kNetBindTcp = 1ULL << 0;     // ABI 4
constexpr std::uint64_t kNetConnectTcp = 1ULL << 1;  // ABI 4

}  // namespace

int landlock_abi() {
  const long abi = ::syscall(__NR_landlock_create_ruleset, nullptr, 0, kCreateRulesetVersion);
  return abi < 0 ? 0 : static_cast<int>(abi);
}

LandlockRules build_write_confinement(const std::vector<std::filesystem::path>& writable_dirs, bool deny_network) {
  LandlockRules rules;
  const int abi = landlock_abi();
  if (abi < 1) return rules;

  std::uint64_t write_access = kFsWriteFile | kFsRemoveDir | kFsRemoveFile | kFsMakeChar | kFsMakeDir | kFsMakeReg |
                               kFsMakeSock | kFsMakeFifo | kFsMakeBlock | kFsMakeSym;
  if (abi >= 2) write_access |= kFsRefer;
  if (abi >= 3) write_access |= kFsTruncate;

  RulesetAttr attr{write_access, 0};
  std::size_t attr_size = sizeof(std::uint64_t);
  if (deny_network && abi >= 4) {
    attr.handled_access_net = kNetBindTcp | kNetConnectTcp;
    attr_size = sizeof(RulesetAttr);
  }
  UniqueFd ruleset(static_cast<int>(::syscall(__NR_landlock_create_ruleset, &attr, attr_size, 0U)));
  if (!ruleset) {
    spdlog::warn("landlock ruleset creation failed; continuing without write confinement");
    return rules;
  }

  auto allow = [&](const std::filesystem::path& path, std::uint64_t access) {
    UniqueFd dir(::open(path.c_str(), O_PATH | O_CLOEXEC));
    if (!dir) return false;
    PathBeneathAttr beneath{access, dir.get()};
    return ::syscall(__NR_landlock_add_rule, ruleset.get(), kRulePathBeneath, &beneath, 0U) == 0;
  };
  for (const auto& dir : writable_dirs) {
    if (!allow(dir, write_access)) {
      spdlog::warn("landlock rule for {} rejected; continuing without write confinement", dir.string());
      return LandlockRules{};
    }
  }
  allow("/dev", kFsWriteFile | (abi >= 3 ? kFsTruncate : 0));

  rules.ruleset = std::move(ruleset);
  rules.network_denied = attr.handled_access_net != 0;
  return rules;
}

}  // namespace hypoflow::sandbox
