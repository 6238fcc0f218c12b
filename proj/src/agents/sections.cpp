#include "hypoflow/agents/sections.hpp"

#include <cctype>
#include <optional>
#include <sstream>
#include <vector>

#include "hypoflow/core/error.hpp"

namespace hypoflow::agents {

namespace {

struct Header {
  std::size_t name_index;
  std::string inline_body;
};

char fold(char c) {
  if (c == '_') return ' ';
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

void skip_spaces(std::string_view s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

void skip_emphasis(std::string_view s, std::size_t& i) {
  while (i < s.size() && (s[i] == '*' || s[i] == '_')) ++i;
}

std::optional<Header> match_header(std::string_view line, std::span<const std::string_view> names) {
  std::size_t i = 0;
  skip_spaces(line, i);
  std::size_t hashes = 0;
  while (i < line.size() && line[i] == '#') {
    ++hashes;
    ++i;
  }
  if (hashes > 6) return std::nullopt;
  skip_spaces(line, i);
  // Optional list numbering such as "3." or "3)".
  if (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
    std::size_t j = i;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    if (j < line.size() && (line[j] == '.' || line[j] == ')')) {
      i = j + 1;
      skip_spaces(line, i);
    }
  }
  skip_emphasis(line, i);

  for (std::size_t n = 0; n < names.size(); ++n) {
    const auto name = names[n];
    if (line.size() - i < name.size()) continue;
    bool same = true;
    for (std::size_t k = 0; k < name.size() && same; ++k) same = fold(line[i + k]) == fold(name[k]);
    if (!same) continue;

    std::size_t j = i + name.size();
    skip_emphasis(line, j);
    skip_spaces(line, j);
    bool colon = false;
    if (j < line.size() && line[j] == ':') {
      colon = true;
      ++j;
      skip_emphasis(line, j);
    }
    const auto rest = trim(line.substr(j));
    if (colon) return Header{n, rest};
    if (hashes > 0 && rest.empty()) return Header{n, {}};
  }
  return std::nullopt;
}

}  // namespace

std::map<std::string, std::string> parse_labeled_sections(std::string_view text,
                                                          std::span<const std::string_view> names) {
  std::map<std::string, std::string> out;
  std::optional<std::size_t> current;
  std::string body;
  bool in_fence = false;

  auto flush = [&] {
    if (current) out[std::string(names[*current])] = trim(body);
    body.clear();
  };

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = trim(line);
    if (t.rfind("```", 0) == 0 || t.rfind("~~~", 0) == 0) in_fence = !in_fence;
    auto header = in_fence ? std::nullopt : match_header(line, names);
    if (header) {
      flush();
      const std::string key(names[header->name_index]);
      if (out.count(key)) throw Error(ErrorCode::DuplicateField, key);
      current = header->name_index;
      body = header->inline_body;
      if (!body.empty()) body += "\n";
      out[key];
      continue;
    }
    if (current) body += line + "\n";
  }
  flush();
  return out;
}

ResearchIdea parse_idea(std::string_view text) {
  const auto sections = parse_labeled_sections(text, ResearchIdea::field_names);
  ResearchIdea idea;
  for (auto name : ResearchIdea::field_names) {
    auto it = sections.find(std::string(name));
    if (it == sections.end() || it->second.empty()) throw Error(ErrorCode::MissingField, std::string(name));
    idea.field(name) = it->second;
  }
  return idea;
}

std::string format_idea(const ResearchIdea& idea) {
  std::string out;
  for (auto name : ResearchIdea::field_names) {
    std::string label(name);
    label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
    if (!out.empty()) out += "\n";
    out += label + ": " + idea.field(name) + "\n";
  }
  return out;
}

}  // namespace hypoflow::agents
