#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hypoflow/cli/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = hypoflow::cli;

  CLI::App app{"hypoflow: multi-agent hypothesis discovery runs"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, query_path, fixtures_path, run_dir, workspace, run_id;
  std::uint64_t seed = 0;
  bool json = false;
  bool verbose = false;
  app.add_flag("--json", json, "Print machine-readable JSON instead of the text summary");
  app.add_flag("-v,--verbose", verbose, "Log stage progress to stderr");

  auto seed_opt = [&](CLI::App* cmd) { return cmd->add_option("--seed", seed, "Override the run seed from the config"); };
  auto workspace_opt = [&](CLI::App* cmd) {
    cmd->add_option("--workspace", workspace, "Override the workspace directory from the config");
    cmd->add_option("--run-id", run_id, "Name of the new run directory (default: timestamp plus random suffix)");
  };

  auto* run = app.add_subcommand("run", "Run the full pipeline against the live model backend");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--query", query_path, "Research query (JSON)")->required()->check(CLI::ExistingFile);
  auto* run_seed = seed_opt(run);
  workspace_opt(run);

  auto* mock = app.add_subcommand("mock-run", "Run the pipeline offline against scripted fixture replies");
  mock->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  mock->add_option("--query", query_path, "Research query (JSON)")->required()->check(CLI::ExistingFile);
  mock->add_option("--fixtures", fixtures_path, "Fixture document")->required()->check(CLI::ExistingFile);
  auto* mock_seed = seed_opt(mock);
  workspace_opt(mock);

  auto* resume = app.add_subcommand("resume", "Continue a run from its first incomplete stage");
  resume->add_option("--run-dir", run_dir, "Run directory")->required();
  resume->add_option("--fixtures", fixtures_path, "Resume against scripted fixtures instead of the live backend");
  auto* resume_seed = seed_opt(resume);

  auto* inspect = app.add_subcommand("inspect", "Summarize a run directory without modifying it");
  inspect->add_option("--run-dir", run_dir, "Run directory")->required();

  auto* validate = app.add_subcommand("validate", "Check config, query, prompts and tool registry");
  validate->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  validate->add_option("--query", query_path, "Research query (JSON)")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInvalid;
  }

  auto logger = spdlog::stderr_color_mt("hypoflow");
  spdlog::set_default_logger(logger);
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  cli::CommandOptions opts;
  opts.json = json;
  if (*run_seed || *mock_seed || *resume_seed) opts.seed = seed;
  if (!workspace.empty()) opts.workspace = workspace;
  if (!run_id.empty()) opts.run_id = run_id;

  if (*run) return cli::cmd_run(config_path, query_path, opts);
  if (*mock) return cli::cmd_mock_run(config_path, query_path, fixtures_path, opts);
  if (*resume)
    return cli::cmd_resume(run_dir, fixtures_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(fixtures_path),
                           opts);
  if (*inspect) return cli::cmd_inspect(run_dir, opts);
  return cli::cmd_validate(config_path, query_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(query_path),
                           opts);
}
