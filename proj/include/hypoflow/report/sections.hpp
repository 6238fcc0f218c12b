#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace hypoflow::report {

using json = nlohmann::json;

enum class SectionKind { Introduction, Methods, Results, Conclusion, Outlook };

// Order of the sections in the assembled document.
inline constexpr std::array<SectionKind, 5> kSectionOrder = {
    SectionKind::Introduction, SectionKind::Methods, SectionKind::Results, SectionKind::Conclusion,
    SectionKind::Outlook};

std::string_view to_string(SectionKind kind);
std::optional<SectionKind> section_kind_from_string(std::string_view name);
std::string writer_role(SectionKind kind);     // "Results_1"
std::string reflector_role(SectionKind kind);  // "Results_2"
std::string section_file_name(SectionKind kind);  // "results.tex"

struct ReportSection {
  SectionKind kind = SectionKind::Introduction;
  std::string body;
  std::string highlight_box;

  bool operator==(const ReportSection&) const = default;
};

void to_json(json& j, const ReportSection& s);

// Text between <highlight> and </highlight>, trimmed. Throws
// MissingHighlightBox(role) when absent or empty.
std::string extract_highlight(std::string_view reply, std::string_view role);

// Reply with the highlight element removed.
std::string strip_highlight(std::string_view reply);

// Writer output as section body: the first fenced block when there is one,
// otherwise the whole reply, trimmed.
std::string section_body(std::string_view writer_output);

// Escapes LaTeX special characters in plain text.
std::string latex_escape(std::string_view text);

}  // namespace hypoflow::report
