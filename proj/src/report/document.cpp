#include "hypoflow/report/document.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "hypoflow/core/error.hpp"
#include "hypoflow/core/run_store.hpp"
#include "hypoflow/sandbox/executor.hpp"
#include "hypoflow/sandbox/process.hpp"

namespace hypoflow::report {

namespace {

constexpr const char* kPreamble = R"(\documentclass[11pt]{article}
\usepackage[margin=1in]{geometry}
\usepackage{amsmath}
\usepackage{graphicx}
\usepackage{framed}
\graphicspath{{../plots/}}
\newenvironment{highlightbox}{\begin{framed}\noindent\textbf{Highlights.}\ }{\end{framed}}
)";

std::string section_text(const ReportSection& s) {
  std::ostringstream out;
  out << "\\section{" << to_string(s.kind) << "}\n"
      << "\\begin{highlightbox}\n" << s.highlight_box << "\n\\end{highlightbox}\n\n"
      << s.body << "\n";
  return out.str();
}

std::string label_for(const fs::path& figure) {
  std::string stem = figure.stem().string();
  for (char& c : stem)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '-';
  return "fig:" + stem;
}

}  // namespace

DocumentFiles assemble_document(const fs::path& report_dir, const std::vector<ReportSection>& sections,
                                const std::vector<FigureAnalysis>& analyses, const DocumentMetadata& metadata) {
  std::map<SectionKind, const ReportSection*> by_kind;
  for (const auto& s : sections) by_kind[s.kind] = &s;
  for (auto kind : kSectionOrder)
    if (!by_kind.count(kind)) throw Error(ErrorCode::MissingSection, std::string(to_string(kind)));

  fs::create_directories(report_dir);
  DocumentFiles files;
  for (auto kind : kSectionOrder) {
    ReportSection s = *by_kind[kind];
    if (kind == SectionKind::Results && analyses.empty()) s.body += std::string("\n\n") + kNoFiguresNotice;
    const auto path = report_dir / section_file_name(kind);
    write_text_atomic(path, section_text(s));
    files.section_files.push_back(path);
  }

  std::ostringstream main;
  main << kPreamble << "\n\\title{" << latex_escape(metadata.title) << "}\n";
  if (!metadata.run_id.empty()) main << "\\date{Run " << latex_escape(metadata.run_id) << "}\n";
  main << "\n\\begin{document}\n\\maketitle\n\n";
  for (auto kind : kSectionOrder) {
    main << "\\input{" << fs::path(section_file_name(kind)).stem().string() << "}\n";
    if (kind != SectionKind::Results) continue;
    for (const auto& a : analyses) {
      main << "\n\\begin{figure}[htbp]\n\\centering\n"
           << "\\includegraphics[width=0.8\\linewidth]{" << a.figure_path.filename().string() << "}\n"
           << "\\caption{" << latex_escape(a.caption) << "}\n"
           << "\\label{" << label_for(a.figure_path) << "}\n"
           << "\\end{figure}\n\n";
    }
  }
  main << "\n\\end{document}\n";
  files.main_tex = report_dir / "main.tex";
  write_text_atomic(files.main_tex, main.str());
  return files;
}

std::optional<fs::path> compile_document(const fs::path& report_dir, const std::string& latex_command,
                                         double timeout_seconds) {
  auto argv = sandbox::split_command(latex_command);
  const char* path_env = std::getenv("PATH");
  const std::string search_path = path_env ? path_env : "/usr/bin:/bin";
  if (argv.empty() || !sandbox::find_program(argv[0], search_path)) {
    spdlog::warn("LaTeX compiler '{}' not found; keeping sources only", latex_command);
    return std::nullopt;
  }
  argv.insert(argv.end(), {"-interaction=nonstopmode", "-halt-on-error", "main.tex"});

  sandbox::ProcessSpec spec;
  spec.argv = argv;
  spec.env = {"PATH=" + search_path};
  if (const char* home = std::getenv("HOME")) spec.env.push_back(std::string("HOME=") + home);
  spec.cwd = report_dir;
  spec.stdout_path = report_dir / "latex.log";
  spec.stderr_path = report_dir / "latex.err";
  spec.timeout = std::chrono::duration<double>(timeout_seconds);
  try {
    const auto result = sandbox::run_process(spec);
    const auto pdf = report_dir / "main.pdf";
    if (result.exit_status == 0 && fs::exists(pdf)) return pdf;
    spdlog::warn("LaTeX compilation failed with exit status {}; see {}", result.exit_status,
                 spec.stdout_path.string());
  } catch (const Error& e) {
    spdlog::warn("LaTeX compilation could not start: {}", e.what());
  }
  return std::nullopt;
}

}  // namespace hypoflow::report
