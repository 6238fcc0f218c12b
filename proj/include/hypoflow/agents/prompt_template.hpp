#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace hypoflow::agents {

using Bindings = std::map<std::string, std::string>;

// Text with {named} placeholders. "{{" and "}}" render as literal braces; a
// brace not enclosing an identifier is kept verbatim, so JSON snippets in
// prompts need no escaping.
struct PromptTemplate {
  std::string body;
  std::set<std::string> required;

  static PromptTemplate parse(std::string body);
};

// Substitutes every placeholder in one pass (substituted text is not
// rescanned). Extra bindings are ignored. Throws UnboundPlaceholder.
std::string render_prompt(const PromptTemplate& tpl, const Bindings& bindings);

// Templates for one agent role, loaded from prompts/<Role>.txt:
//
//   version: 1
//   [system]
//   ...
//   [prompt]
//   ...
//   [repair]        (reflectors of executed scripts only)
//   ...
struct RoleTemplates {
  std::string role;
  std::string version;
  PromptTemplate system;
  PromptTemplate prompt;
  std::optional<PromptTemplate> repair;
  std::string sha256;  // of the file bytes
};

RoleTemplates parse_role_templates(std::string role, std::string_view file_text);

class PromptLibrary {
 public:
  // Loads one file per pipeline role; a missing file is an InvalidConfig error.
  static PromptLibrary load(const std::filesystem::path& dir);

  const RoleTemplates& at(std::string_view role) const;
  const std::map<std::string, RoleTemplates, std::less<>>& all() const noexcept { return templates_; }

  void add(RoleTemplates templates);

 private:
  std::map<std::string, RoleTemplates, std::less<>> templates_;
};

std::string sha256_hex(std::string_view data);

}  // namespace hypoflow::agents
