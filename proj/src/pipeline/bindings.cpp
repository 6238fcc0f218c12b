#include "hypoflow/pipeline/bindings.hpp"

#include <fstream>
#include <sstream>

namespace hypoflow::pipeline {

std::string render_constraints(const std::vector<std::string>& constraints) {
  if (constraints.empty()) return "(none)";
  std::string out;
  for (const auto& c : constraints) {
    if (!out.empty()) out += '\n';
    out += "- " + c;
  }
  return out;
}

std::string read_capped(const fs::path& path, std::size_t max_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  auto text = buf.str();
  if (text.size() > max_bytes) {
    text.resize(max_bytes);
    text += "\n[truncated]";
  }
  return text;
}

std::string rounds_summary(const std::vector<RoundArtifacts>& rounds, const fs::path& relative_to) {
  std::ostringstream out;
  for (const auto& r : rounds) {
    const auto dir = r.results_path.parent_path();
    out << "### Round " << r.round_index << " (" << fs::relative(dir, relative_to).generic_string() << ")\n"
        << "final_results.json:\n" << read_capped(r.final_results_path, 20000) << "\n"
        << "notes.txt:\n" << read_capped(r.notes_path, 20000) << "\n\n";
  }
  return out.str();
}

}  // namespace hypoflow::pipeline
