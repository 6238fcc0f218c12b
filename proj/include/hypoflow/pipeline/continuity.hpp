#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hypoflow::pipeline {

using json = nlohmann::json;

struct ContinuityReport {
  std::vector<std::string> violations;  // "<key>: dropped", "<key>: not a prefix", "<key>: type changed"

  bool ok() const { return violations.empty(); }
};

// Append-only check of one round's results document against the previous
// round's: every top-level key of `prev` must survive in `next`, and a list
// value of `prev` must be a prefix of the corresponding list in `next`.
// A top-level list is checked under the key "(root)".
ContinuityReport check_continuity(const json& prev, const json& next);

void to_json(json& j, const ContinuityReport& r);

}  // namespace hypoflow::pipeline
