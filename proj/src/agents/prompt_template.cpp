#include "hypoflow/agents/prompt_template.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hypoflow/core/error.hpp"
#include "hypoflow/core/roles.hpp"
#include "hypoflow/core/types.hpp"

namespace hypoflow::agents {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Length of "{name}" starting at `pos`, or 0 when the brace does not open a
// placeholder.
std::size_t placeholder_length(std::string_view body, std::size_t pos) {
  if (pos + 2 >= body.size() || body[pos] != '{' || !ident_start(body[pos + 1])) return 0;
  std::size_t end = pos + 2;
  while (end < body.size() && ident_char(body[end])) ++end;
  if (end >= body.size() || body[end] != '}') return 0;
  return end - pos + 1;
}

template <typename OnLiteral, typename OnPlaceholder>
void scan(std::string_view body, OnLiteral on_literal, OnPlaceholder on_placeholder) {
  std::size_t i = 0;
  while (i < body.size()) {
    if (body.compare(i, 2, "{{") == 0) {
      on_literal("{");
      i += 2;
    } else if (body.compare(i, 2, "}}") == 0) {
      on_literal("}");
      i += 2;
    } else if (auto len = placeholder_length(body, i); len > 0) {
      on_placeholder(std::string(body.substr(i + 1, len - 2)));
      i += len;
    } else {
      on_literal(body.substr(i, 1));
      ++i;
    }
  }
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string body) {
  PromptTemplate tpl;
  scan(body, [](std::string_view) {}, [&](std::string name) { tpl.required.insert(std::move(name)); });
  tpl.body = std::move(body);
  return tpl;
}

std::string render_prompt(const PromptTemplate& tpl, const Bindings& bindings) {
  for (const auto& name : tpl.required) {
    if (!bindings.count(name)) throw Error(ErrorCode::UnboundPlaceholder, name);
  }
  std::string out;
  out.reserve(tpl.body.size());
  scan(
      tpl.body, [&](std::string_view lit) { out.append(lit); },
      [&](const std::string& name) {
        auto it = bindings.find(name);
        if (it == bindings.end()) throw Error(ErrorCode::UnboundPlaceholder, name);
        out.append(it->second);
      });
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

RoleTemplates parse_role_templates(std::string role, std::string_view file_text) {
  RoleTemplates out;
  out.role = std::move(role);
  out.sha256 = sha256_hex(file_text);

  std::map<std::string, std::string> sections;
  std::string current;  // empty = header block
  std::istringstream in{std::string(file_text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t == "[system]" || t == "[prompt]" || t == "[repair]") {
      current = t.substr(1, t.size() - 2);
      if (sections.count(current)) throw Error(ErrorCode::InvalidConfig, out.role, "duplicate section " + t);
      sections[current];
      continue;
    }
    if (current.empty()) {
      if (t.rfind("version:", 0) == 0) out.version = trim(t.substr(8));
      continue;
    }
    sections[current] += line + "\n";
  }
  for (const char* required : {"system", "prompt"}) {
    if (!sections.count(required) || trim(sections[required]).empty())
      throw Error(ErrorCode::InvalidConfig, out.role, std::string("template lacks a [") + required + "] section");
  }
  out.system = PromptTemplate::parse(trim(sections["system"]));
  out.prompt = PromptTemplate::parse(trim(sections["prompt"]));
  if (sections.count("repair")) out.repair = PromptTemplate::parse(trim(sections["repair"]));
  return out;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  PromptLibrary lib;
  for (auto role : roles::kAll) {
    const auto path = dir / (std::string(role) + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidConfig, path.string(), "missing prompt template");
    std::ostringstream buf;
    buf << in.rdbuf();
    lib.add(parse_role_templates(std::string(role), buf.str()));
  }
  return lib;
}

const RoleTemplates& PromptLibrary::at(std::string_view role) const {
  auto it = templates_.find(role);
  if (it == templates_.end()) throw Error(ErrorCode::InvalidConfig, std::string(role), "no prompt template loaded");
  return it->second;
}

void PromptLibrary::add(RoleTemplates templates) {
  auto key = templates.role;
  templates_.insert_or_assign(std::move(key), std::move(templates));
}

}  // namespace hypoflow::agents
