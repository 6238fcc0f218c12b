#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hypoflow::sandbox {

struct FencedBlock {
  std::string info;  // text after the opening fence, trimmed
  std::string body;  // lines between the fences, no trailing newline
};

// All closed ``` / ~~~ fenced blocks in order of appearance.
std::vector<FencedBlock> fenced_blocks(std::string_view text);

struct ScriptSource {
  std::string body;
  std::string language_hint;
  std::string origin;  // "<role>#<call index>", empty when unknown

  bool operator==(const ScriptSource&) const = default;
};

// First non-empty fenced block of `reply`. Throws NoCodeBlock.
ScriptSource extract_script(std::string_view reply, std::string origin = {});

}  // namespace hypoflow::sandbox
