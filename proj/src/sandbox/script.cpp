#include "hypoflow/sandbox/script.hpp"

#include <sstream>

#include "hypoflow/core/error.hpp"
#include "hypoflow/core/types.hpp"

namespace hypoflow::sandbox {

namespace {

struct Fence {
  char marker;
  std::size_t length;
  std::string info;
};

std::optional<Fence> opening_fence(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && i < 3 && line[i] == ' ') ++i;
  if (i >= line.size() || (line[i] != '`' && line[i] != '~')) return std::nullopt;
  const char marker = line[i];
  std::size_t n = 0;
  while (i + n < line.size() && line[i + n] == marker) ++n;
  if (n < 3) return std::nullopt;
  auto info = trim(line.substr(i + n));
  if (marker == '`' && info.find('`') != std::string::npos) return std::nullopt;
  return Fence{marker, n, info};
}

bool closes(std::string_view line, const Fence& fence) {
  const auto t = trim(line);
  if (t.size() < fence.length) return false;
  for (char c : t) {
    if (c != fence.marker) return false;
  }
  return true;
}

}  // namespace

std::vector<FencedBlock> fenced_blocks(std::string_view text) {
  std::vector<FencedBlock> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<Fence> open;
  std::string body;
  bool first_line = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!open) {
      open = opening_fence(line);
      body.clear();
      first_line = true;
      continue;
    }
    if (closes(line, *open)) {
      out.push_back(FencedBlock{open->info, body});
      open.reset();
      continue;
    }
    if (!first_line) body += "\n";
    body += line;
    first_line = false;
  }
  return out;
}

ScriptSource extract_script(std::string_view reply, std::string origin) {
  for (auto& block : fenced_blocks(reply)) {
    if (trim(block.body).empty()) continue;
    std::string hint;
    if (!block.info.empty()) hint = block.info.substr(0, block.info.find_first_of(" \t{"));
    return ScriptSource{std::move(block.body), std::move(hint), std::move(origin)};
  }
  throw Error(ErrorCode::NoCodeBlock, origin, "reply contains no fenced code block");
}

}  // namespace hypoflow::sandbox
