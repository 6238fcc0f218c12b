#include "hypoflow/pipeline/continuity.hpp"

#include <algorithm>

namespace hypoflow::pipeline {

namespace {

void check_value(const std::string& key, const json& prev, const json& next, ContinuityReport& report) {
  if (!prev.is_array()) return;
  if (!next.is_array()) {
    report.violations.push_back(key + ": type changed");
    return;
  }
  if (prev.size() > next.size() || !std::equal(prev.begin(), prev.end(), next.begin()))
    report.violations.push_back(key + ": not a prefix");
}

}  // namespace

ContinuityReport check_continuity(const json& prev, const json& next) {
  ContinuityReport report;
  if (prev.is_array()) {
    check_value("(root)", prev, next, report);
    return report;
  }
  if (!prev.is_object()) return report;
  if (!next.is_object()) {
    report.violations.push_back("(root): type changed");
    return report;
  }
  for (const auto& [key, value] : prev.items()) {
    auto it = next.find(key);
    if (it == next.end()) {
      report.violations.push_back(key + ": dropped");
      continue;
    }
    check_value(key, value, *it, report);
  }
  return report;
}

void to_json(json& j, const ContinuityReport& r) { j = json{{"ok", r.ok()}, {"violations", r.violations}}; }

}  // namespace hypoflow::pipeline
