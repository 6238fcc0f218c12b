#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hypoflow::report {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr const char* kPlotScript = "plot_script.py";
inline constexpr const char* kFitParams = "fit_params.json";

struct FigureAnalysis {
  fs::path figure_path;
  std::string caption;
  std::string interpretation;
  std::vector<std::string> key_insights;

  bool operator==(const FigureAnalysis&) const = default;
};

void to_json(json& j, const FigureAnalysis& a);
void from_json(const json& j, FigureAnalysis& a);

// Parses a Plot_Analyzer reply with "Caption", "Interpretation" and
// "Key insights" sections. Insights are the bullet items of their section.
// Throws MissingField("caption" | "interpretation" | "key_insights").
FigureAnalysis parse_figure_analysis(std::string_view reply, const fs::path& figure);

// *.png and *.pdf directly inside `plots_dir`, sorted by name.
std::vector<fs::path> list_figures(const fs::path& plots_dir);

// fit_params.json: {figure_name: {model: string, params: object, r_squared: number}}.
// Throws MalformedArtifact(fit_params.json) naming the offending entry.
void validate_fit_params(const json& doc);

}  // namespace hypoflow::report
