#pragma once

#include <filesystem>
#include <vector>

#include "hypoflow/sandbox/process.hpp"

namespace hypoflow::sandbox {

// Landlock ABI version of the running kernel, 0 when unsupported.
int landlock_abi();

struct LandlockRules {
  UniqueFd ruleset;
  bool network_denied = false;  // TCP bind/connect handled (ABI >= 4)
};

// Ruleset that denies every filesystem write outside `writable_dirs` (plus
// /dev) and, when `deny_network` is set and the kernel supports it, all TCP
// bind/connect. Reads and execution stay unrestricted. Returns an empty
// ruleset when Landlock is unavailable.
LandlockRules build_write_confinement(const std::vector<std::filesystem::path>& writable_dirs, bool deny_network);

}  // namespace hypoflow::sandbox
