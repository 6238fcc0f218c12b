#include "hypoflow/report/figures.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "hypoflow/agents/sections.hpp"
#include "hypoflow/core/error.hpp"
#include "hypoflow/core/types.hpp"

namespace hypoflow::report {

namespace {

constexpr std::array<std::string_view, 3> kHeaders = {"Caption", "Interpretation", "Key insights"};

std::string strip_bullet(std::string_view line) {
  auto text = trim(line);
  if (text.empty()) return text;
  if (text[0] == '-' || text[0] == '*' || text.rfind("•", 0) == 0) {
    const auto skip = text[0] == '-' || text[0] == '*' ? 1 : std::string("•").size();
    return trim(std::string_view(text).substr(skip));
  }
  std::size_t digits = 0;
  while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits]))) ++digits;
  if (digits > 0 && digits < text.size() && (text[digits] == '.' || text[digits] == ')'))
    return trim(std::string_view(text).substr(digits + 1));
  return text;
}

}  // namespace

void to_json(json& j, const FigureAnalysis& a) {
  j = json{{"figure", a.figure_path.generic_string()},
           {"caption", a.caption},
           {"interpretation", a.interpretation},
           {"key_insights", a.key_insights}};
}

void from_json(const json& j, FigureAnalysis& a) {
  a.figure_path = j.at("figure").get<std::string>();
  a.caption = j.at("caption").get<std::string>();
  a.interpretation = j.at("interpretation").get<std::string>();
  a.key_insights = j.at("key_insights").get<std::vector<std::string>>();
}

FigureAnalysis parse_figure_analysis(std::string_view reply, const fs::path& figure) {
  const auto sections = agents::parse_labeled_sections(reply, kHeaders);
  auto get = [&](std::string_view header, const char* field) {
    auto it = sections.find(std::string(header));
    if (it == sections.end() || it->second.empty()) throw Error(ErrorCode::MissingField, field);
    return it->second;
  };
  FigureAnalysis a;
  a.figure_path = figure;
  a.caption = get("Caption", "caption");
  a.interpretation = get("Interpretation", "interpretation");

  std::istringstream lines(get("Key insights", "key_insights"));
  std::string line;
  while (std::getline(lines, line)) {
    auto item = strip_bullet(line);
    if (!item.empty()) a.key_insights.push_back(std::move(item));
  }
  if (a.key_insights.empty()) throw Error(ErrorCode::MissingField, "key_insights");
  return a;
}

std::vector<fs::path> list_figures(const fs::path& plots_dir) {
  std::vector<fs::path> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(plots_dir, ec)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".pdf") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void validate_fit_params(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::MalformedArtifact, kFitParams, "top level must be an object");
  for (const auto& [name, entry] : doc.items()) {
    const bool ok = entry.is_object() && entry.contains("model") && entry["model"].is_string() &&
                    entry.contains("params") && entry["params"].is_object() && entry.contains("r_squared") &&
                    entry["r_squared"].is_number();
    if (!ok) throw Error(ErrorCode::MalformedArtifact, kFitParams, "entry '" + name + "' needs model, params, r_squared");
  }
}

}  // namespace hypoflow::report
