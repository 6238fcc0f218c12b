#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hypoflow/report/figures.hpp"
#include "hypoflow/report/sections.hpp"

namespace hypoflow::report {

struct DocumentMetadata {
  std::string title;
  std::string run_id;
};

struct DocumentFiles {
  std::vector<fs::path> section_files;  // canonical order
  fs::path main_tex;
  std::optional<fs::path> compiled;
};

inline constexpr const char* kNoFiguresNotice = "No figures were produced for this run.";

// Writes one .tex file per section (heading, highlight box, body) and main.tex
// that inputs them in canonical order with one figure environment per
// analysis after the Results section. Figures are referenced relative to
// ../plots/. Throws MissingSection(kind) unless all five kinds are present.
DocumentFiles assemble_document(const fs::path& report_dir, const std::vector<ReportSection>& sections,
                                const std::vector<FigureAnalysis>& analyses, const DocumentMetadata& metadata);

// Runs `latex_command` on main.tex inside `report_dir`. Returns the PDF path,
// or nothing (with a logged warning) when the compiler is missing or fails.
std::optional<fs::path> compile_document(const fs::path& report_dir, const std::string& latex_command,
                                         double timeout_seconds = 300.0);

}  // namespace hypoflow::report
