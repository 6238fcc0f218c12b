#include "hypoflow/report/sections.hpp"

#include "hypoflow/core/error.hpp"
#include "hypoflow/core/types.hpp"
#include "hypoflow/sandbox/script.hpp"

namespace hypoflow::report {

namespace {

constexpr std::string_view kOpen = "<highlight>";
constexpr std::string_view kClose = "</highlight>";

}  // namespace

std::string_view to_string(SectionKind kind) {
  switch (kind) {
    case SectionKind::Introduction: return "Introduction";
    case SectionKind::Methods: return "Methods";
    case SectionKind::Results: return "Results";
    case SectionKind::Conclusion: return "Conclusion";
    case SectionKind::Outlook: return "Outlook";
  }
  return "Unknown";
}

std::optional<SectionKind> section_kind_from_string(std::string_view name) {
  for (auto kind : kSectionOrder)
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

std::string writer_role(SectionKind kind) { return std::string(to_string(kind)) + "_1"; }
std::string reflector_role(SectionKind kind) { return std::string(to_string(kind)) + "_2"; }

std::string section_file_name(SectionKind kind) {
  std::string name(to_string(kind));
  name[0] = static_cast<char>(name[0] - 'A' + 'a');
  return name + ".tex";
}

void to_json(json& j, const ReportSection& s) {
  j = json{{"kind", to_string(s.kind)}, {"body", s.body}, {"highlight_box", s.highlight_box}};
}

std::string extract_highlight(std::string_view reply, std::string_view role) {
  const auto open = reply.find(kOpen);
  const auto close = open == std::string_view::npos ? open : reply.find(kClose, open);
  if (close == std::string_view::npos) throw Error(ErrorCode::MissingHighlightBox, std::string(role));
  auto box = trim(reply.substr(open + kOpen.size(), close - open - kOpen.size()));
  if (box.empty()) throw Error(ErrorCode::MissingHighlightBox, std::string(role), "empty highlight");
  return box;
}

std::string strip_highlight(std::string_view reply) {
  const auto open = reply.find(kOpen);
  if (open == std::string_view::npos) return std::string(reply);
  const auto close = reply.find(kClose, open);
  if (close == std::string_view::npos) return std::string(reply);
  return std::string(reply.substr(0, open)) + std::string(reply.substr(close + kClose.size()));
}

std::string section_body(std::string_view writer_output) {
  for (const auto& block : sandbox::fenced_blocks(writer_output))
    if (!trim(block.body).empty()) return trim(block.body);
  return trim(writer_output);
}

std::string latex_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\textbackslash{}"; break;
      case '&': case '%': case '$': case '#': case '_': case '{': case '}':
        out += '\\';
        out += c;
        break;
      case '~': out += "\\textasciitilde{}"; break;
      case '^': out += "\\textasciicircum{}"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace hypoflow::report
