#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hypoflow/core/types.hpp"

namespace hypoflow::pipeline {

namespace fs = std::filesystem;

// Prompt-ready text shared by the stages.

// "- c1\n- c2", or "(none)".
std::string render_constraints(const std::vector<std::string>& constraints);

// File contents cut to `max_bytes` with a marker; empty when unreadable.
std::string read_capped(const fs::path& path, std::size_t max_bytes = 60000);

// Per-round digest of final_results.json and notes.txt, with each round's
// directory shown relative to `relative_to`.
std::string rounds_summary(const std::vector<RoundArtifacts>& rounds, const fs::path& relative_to);

}  // namespace hypoflow::pipeline
