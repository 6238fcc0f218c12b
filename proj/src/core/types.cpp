#include "hypoflow/core/types.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "hypoflow/core/error.hpp"
#include "hypoflow/core/roles.hpp"

namespace hypoflow {

std::string trim(std::string_view text) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  auto begin = std::find_if_not(text.begin(), text.end(), is_space);
  auto end = std::find_if_not(text.rbegin(), text.rend(), is_space).base();
  if (begin >= end) return {};
  return std::string(begin, end);
}

void ResearchQuery::validate() const {
  if (trim(text).empty()) throw Error(ErrorCode::InvalidQuery, "text", "query text is empty");
  if (n_test && *n_test < 0) throw Error(ErrorCode::InvalidQuery, "n_test", "must be non-negative");
}

void to_json(json& j, const ResearchQuery& q) {
  j = json{{"text", q.text}, {"constraints", q.constraints}};
  if (q.n_test) j["n_test"] = *q.n_test;
}

void from_json(const json& j, ResearchQuery& q) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidQuery, "", "query must be a JSON object");
  if (!j.contains("text") || !j.at("text").is_string())
    throw Error(ErrorCode::InvalidQuery, "text", "missing or not a string");
  q.text = j.at("text").get<std::string>();
  q.constraints.clear();
  if (j.contains("constraints")) {
    if (!j.at("constraints").is_array()) throw Error(ErrorCode::InvalidQuery, "constraints", "must be a list");
    for (const auto& c : j.at("constraints")) {
      if (!c.is_string()) throw Error(ErrorCode::InvalidQuery, "constraints", "entries must be strings");
      q.constraints.push_back(c.get<std::string>());
    }
  }
  q.n_test.reset();
  if (j.contains("n_test") && !j.at("n_test").is_null()) {
    if (!j.at("n_test").is_number_integer()) throw Error(ErrorCode::InvalidQuery, "n_test", "must be an integer");
    q.n_test = j.at("n_test").get<int>();
  }
}

std::string& ResearchIdea::field(std::string_view name) {
  return const_cast<std::string&>(std::as_const(*this).field(name));
}

const std::string& ResearchIdea::field(std::string_view name) const {
  if (name == "idea") return idea;
  if (name == "hypothesis") return hypothesis;
  if (name == "mechanism") return mechanism;
  if (name == "outcome") return outcome;
  if (name == "approach") return approach;
  if (name == "feasibility") return feasibility;
  if (name == "novelty") return novelty;
  if (name == "challenge") return challenge;
  throw Error(ErrorCode::InvalidIdea, std::string(name), "unknown idea field");
}

void ResearchIdea::validate() const {
  for (auto name : field_names) {
    if (trim(field(name)).empty()) throw Error(ErrorCode::MissingField, std::string(name));
  }
}

void to_json(json& j, const ResearchIdea& idea) {
  j = json::object();
  for (auto name : ResearchIdea::field_names) j[std::string(name)] = idea.field(name);
}

void from_json(const json& j, ResearchIdea& idea) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidIdea, "", "idea must be a JSON object");
  for (auto name : ResearchIdea::field_names) {
    const std::string key(name);
    if (!j.contains(key) || !j.at(key).is_string()) throw Error(ErrorCode::MissingField, key);
    idea.field(name) = j.at(key).get<std::string>();
  }
  idea.validate();
}

void to_json(json& j, const ToolParameter& p) {
  j = json{{"name", p.name}, {"type", p.type}, {"format", p.format}};
}

void from_json(const json& j, ToolParameter& p) {
  p.name = j.value("name", "");
  p.type = j.value("type", "");
  p.format = j.value("format", "");
}

void ToolDescriptor::validate() const {
  const bool has_space = std::any_of(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); });
  if (name.empty() || has_space) throw Error(ErrorCode::InvalidTool, name, "tool name must be a non-empty identifier");
  if (outputs.empty()) throw Error(ErrorCode::InvalidTool, name, "tool must declare at least one output");
}

void to_json(json& j, const ToolDescriptor& t) {
  j = json{{"name", t.name}, {"description", t.description}, {"inputs", t.inputs}, {"outputs", t.outputs}};
  if (!t.notes.empty()) j["notes"] = t.notes;
}

void from_json(const json& j, ToolDescriptor& t) {
  t.name = j.value("name", "");
  t.description = j.value("description", "");
  t.inputs = j.value("inputs", std::vector<ToolParameter>{});
  t.outputs = j.value("outputs", std::vector<ToolParameter>{});
  t.notes = j.value("notes", std::vector<std::string>{});
}

ToolRegistry::ToolRegistry(std::vector<ToolDescriptor> tools) : tools_(std::move(tools)) {
  std::set<std::string> seen;
  for (const auto& tool : tools_) {
    tool.validate();
    if (!seen.insert(tool.name).second) throw Error(ErrorCode::DuplicateTool, tool.name);
  }
}

ToolRegistry ToolRegistry::from_json(const json& j) {
  const json& list = j.is_object() ? j.at("tools") : j;
  return ToolRegistry(list.get<std::vector<ToolDescriptor>>());
}

ToolRegistry ToolRegistry::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, path.string(), "cannot open tool registry");
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string(), e.what());
  }
}

json ToolRegistry::to_json() const { return json{{"tools", tools_}}; }

bool ToolRegistry::contains(std::string_view name) const {
  return std::any_of(tools_.begin(), tools_.end(), [&](const ToolDescriptor& t) { return t.name == name; });
}

namespace {

void render_parameters(std::ostringstream& out, const std::vector<ToolParameter>& params) {
  for (const auto& p : params) {
    out << "  - " << p.name;
    if (!p.type.empty()) out << " (" << p.type << ")";
    if (!p.format.empty()) out << ": " << p.format;
    out << "\n";
  }
}

}  // namespace

std::string ToolRegistry::render() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < tools_.size(); ++i) {
    const auto& tool = tools_[i];
    if (i > 0) out << "\n";
    out << tool.name << "\n";
    out << "Description: " << tool.description << "\n";
    if (!tool.inputs.empty()) {
      out << "Input:\n";
      render_parameters(out, tool.inputs);
    }
    out << "Output:\n";
    render_parameters(out, tool.outputs);
    if (!tool.notes.empty()) {
      out << "Notes:\n";
      for (const auto& note : tool.notes) out << "  - " << note << "\n";
    }
  }
  return out.str();
}

void to_json(json& j, const RoundArtifacts& r) {
  j = json{{"round_index", r.round_index},
           {"script_path", r.script_path.generic_string()},
           {"results_path", r.results_path.generic_string()},
           {"final_results_path", r.final_results_path.generic_string()},
           {"notes_path", r.notes_path.generic_string()},
           {"stdout_log", r.stdout_log.generic_string()},
           {"stderr_log", r.stderr_log.generic_string()},
           {"exit_status", r.exit_status},
           {"wall_time", r.wall_time}};
}

void from_json(const json& j, RoundArtifacts& r) {
  r.round_index = j.at("round_index").get<int>();
  r.script_path = j.value("script_path", "");
  r.results_path = j.value("results_path", "");
  r.final_results_path = j.value("final_results_path", "");
  r.notes_path = j.value("notes_path", "");
  r.stdout_log = j.value("stdout_log", "");
  r.stderr_log = j.value("stderr_log", "");
  r.exit_status = j.value("exit_status", 0);
  r.wall_time = j.value("wall_time", 0.0);
}

namespace roles {

bool is_known(std::string_view role) { return std::find(kAll.begin(), kAll.end(), role) != kAll.end(); }

bool is_reflector(std::string_view role) { return role.size() > 2 && role.substr(role.size() - 2) == "_2"; }

}  // namespace roles

}  // namespace hypoflow
