#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <stdlib.h>
#include <sys/wait.h>

#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "hypoflow/cli/commands.hpp"
#include "hypoflow/core/run_store.hpp"
#include "test_support.hpp"

namespace hypoflow {
namespace {

using testing::slurp;
using testing::spit;
using testing::TempDir;
using testing::tree_digest;

struct Invocation {
  int exit_code = -1;
  std::string output;
};

// Runs the installed binary with stderr folded into the captured output.
Invocation hypoflow(const std::string& args) {
  const std::string cmd = std::string(HYPOFLOW_CLI) + " " + args + " 2>&1";
  Invocation inv;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return inv;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) inv.output.append(buf, n);
  const int status = pclose(pipe);
  inv.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return inv;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::string mock_args(const fs::path& workspace, const std::string& run_id, const fs::path& fixtures) {
  return "mock-run --config " + q(testing::mock_config_path()) + " --query " + q(testing::query_path()) +
         " --fixtures " + q(fixtures) + " --workspace " + q(workspace) + " --run-id " + run_id;
}

// Fixture document with every {"file": ...} entry inlined so it can live
// outside the fixtures directory.
json inlined_fixtures(const fs::path& path) {
  auto doc = read_json(path);
  for (auto& [role, replies] : doc["replies"].items())
    for (auto& r : replies)
      if (r.is_object() && r.contains("file")) r = json{{"text", slurp(path.parent_path() / r["file"].get<std::string>())}};
  return doc;
}

int count_round_dirs(const fs::path& run) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(run / "rounds"))
    if (e.is_directory()) ++n;
  return n;
}

cli::CommandOptions options(std::ostream& out, const fs::path& workspace, const std::string& run_id) {
  cli::CommandOptions o;
  o.json = true;
  o.workspace = workspace;
  o.run_id = run_id;
  o.out = &out;
  return o;
}

// --- validate -----------------------------------------------------------------

TEST(Cli, ValidateAcceptsTheShippedConfig) {
  const auto inv =
      hypoflow("validate --config " + q(testing::mock_config_path()) + " --query " + q(testing::query_path()));
  EXPECT_EQ(inv.exit_code, 0) << inv.output;
  EXPECT_NE(inv.output.find("validated"), std::string::npos);
}

TEST(Cli, ValidateRejectsAnOutOfRangeTemperature) {
  TempDir tmp;
  auto doc = read_json(testing::mock_config_path());
  doc["agent_models"]["Coder_1"]["temperature"] = 2.5;
  spit(tmp / "config.json", doc.dump());
  const auto inv = hypoflow("--json validate --config " + q(tmp / "config.json"));
  EXPECT_EQ(inv.exit_code, 2) << inv.output;
  const auto out = json::parse(inv.output);
  EXPECT_EQ(out["error"]["code"], "InvalidTemperature");
  EXPECT_EQ(out["error"]["subject"], "2.5");
}

TEST(Cli, ValidateRejectsAMissingRoleBinding) {
  TempDir tmp;
  auto doc = read_json(testing::mock_config_path());
  doc["agent_models"].erase("Refiner_1");
  spit(tmp / "config.json", doc.dump());
  std::ostringstream out;
  cli::CommandOptions o;
  o.out = &out;
  EXPECT_EQ(cli::cmd_validate(tmp / "config.json", std::nullopt, o), cli::kExitInvalid);
  EXPECT_NE(out.str().find("Refiner_1"), std::string::npos) << out.str();
}

TEST(Cli, ValidateRejectsABadQuery) {
  TempDir tmp;
  spit(tmp / "query.json", R"({"text": "", "constraints": []})");
  std::ostringstream out;
  cli::CommandOptions o;
  o.out = &out;
  o.json = true;
  EXPECT_EQ(cli::cmd_validate(testing::mock_config_path(), tmp / "query.json", o), cli::kExitInvalid);
  EXPECT_EQ(json::parse(out.str())["error"]["code"], "InvalidQuery");
}

TEST(Cli, UnknownSubcommandIsAUsageError) {
  EXPECT_EQ(hypoflow("frobnicate").exit_code, 2);
  EXPECT_EQ(hypoflow("mock-run --config /nonexistent.json").exit_code, 2);
}

// --- mock-run, inspect, resume ------------------------------------------------

TEST(Cli, MockRunOfExampleOneProducesFourRounds) {
  TempDir ws;
  const auto inv = hypoflow(mock_args(ws.path(), "ex1", testing::example_fixtures_path()));
  ASSERT_EQ(inv.exit_code, 0) << inv.output;
  EXPECT_NE(inv.output.find("status: Done"), std::string::npos);
  const auto run = ws / "ex1";
  EXPECT_EQ(count_round_dirs(run), 4);
  EXPECT_EQ(read_json(run / "run_record.json")["status"]["stage"], "Done");

  // inspect never writes.
  const auto before = tree_digest(run);
  const auto text = hypoflow("inspect --run-dir " + q(run));
  EXPECT_EQ(text.exit_code, 0) << text.output;
  EXPECT_NE(text.output.find("stage: Done"), std::string::npos);
  EXPECT_NE(text.output.find("rounds: 4"), std::string::npos);
  EXPECT_NE(text.output.find("sections: 5"), std::string::npos);
  const auto js = hypoflow("--json inspect --run-dir " + q(run));
  ASSERT_EQ(js.exit_code, 0) << js.output;
  const auto doc = json::parse(js.output);
  EXPECT_EQ(doc["stage"], "Done");
  EXPECT_EQ(doc["rounds"].size(), 4u);
  EXPECT_EQ(doc["continuity"].size(), 3u);
  for (const auto& c : doc["continuity"]) EXPECT_TRUE(c["violations"].empty());
  EXPECT_GE(doc["figures"].size(), 1u);
  EXPECT_EQ(tree_digest(run), before);
}

TEST(Cli, EarlyStopFixturesGiveOneRound) {
  TempDir ws;
  std::ostringstream out;
  const int code = cli::cmd_mock_run(testing::mock_config_path(), testing::query_path(),
                                     testing::early_stop_fixtures_path(), options(out, ws.path(), "early"));
  ASSERT_EQ(code, 0) << out.str();
  const auto doc = json::parse(out.str());
  EXPECT_EQ(doc["status"]["stage"], "Done");
  EXPECT_EQ(doc["rounds"].size(), 1u);
  EXPECT_EQ(count_round_dirs(ws / "early"), 1);
}

TEST(Cli, TruncatedFixturesFailThenResumeFinishes) {
  TempDir ws;
  auto doc = inlined_fixtures(testing::example_fixtures_path());
  doc["replies"].erase("Plot_Analyzer");
  spit(ws / "short.json", doc.dump());

  const auto inv = hypoflow(mock_args(ws.path(), "cut", ws / "short.json"));
  EXPECT_EQ(inv.exit_code, 1) << inv.output;
  EXPECT_NE(inv.output.find("missing fixture: Plot_Analyzer:0"), std::string::npos) << inv.output;
  const auto run = ws / "cut";
  EXPECT_EQ(count_round_dirs(run), 4);
  EXPECT_TRUE(fs::exists(run / "transcripts" / "Plot_Designer_2_0.json"));

  const auto rounds_before = tree_digest(run / "rounds");
  const auto failed = hypoflow("--json inspect --run-dir " + q(run));
  EXPECT_EQ(failed.exit_code, 0);
  const auto fdoc = json::parse(failed.output);
  EXPECT_EQ(fdoc["stage"], "Failed");
  EXPECT_EQ(fdoc["failure"]["code"], "FixtureMiss");

  // Call indices continue from the transcripts on disk, so the resumed plot
  // pair is served its second fixture.
  auto full = inlined_fixtures(testing::example_fixtures_path());
  for (const char* role : {"Plot_Designer_1", "Plot_Designer_2"}) full["replies"][role].push_back(full["replies"][role][0]);
  spit(ws / "resume.json", full.dump());
  const auto resumed = hypoflow("resume --run-dir " + q(run) + " --fixtures " + q(ws / "resume.json"));
  EXPECT_EQ(resumed.exit_code, 0) << resumed.output;
  EXPECT_NE(resumed.output.find("status: Done"), std::string::npos);
  EXPECT_EQ(tree_digest(run / "rounds"), rounds_before);
  EXPECT_TRUE(fs::exists(run / "report" / "main.tex"));
}

TEST(Cli, InspectRejectsANonRunDirectory) {
  TempDir empty;
  EXPECT_EQ(hypoflow("inspect --run-dir " + q(empty.path())).exit_code, 2);
  EXPECT_EQ(hypoflow("inspect --run-dir " + q(empty / "missing")).exit_code, 2);
}

TEST(Cli, ReusingARunIdIsRejected) {
  TempDir ws;
  std::ostringstream first, second;
  ASSERT_EQ(cli::cmd_mock_run(testing::mock_config_path(), testing::query_path(),
                              testing::early_stop_fixtures_path(), options(first, ws.path(), "same")),
            0);
  EXPECT_EQ(cli::cmd_mock_run(testing::mock_config_path(), testing::query_path(),
                              testing::early_stop_fixtures_path(), options(second, ws.path(), "same")),
            cli::kExitInvalid);
  EXPECT_EQ(json::parse(second.str())["error"]["code"], "RunAlreadyExists");
}

TEST(Cli, SeedOverrideReachesTheScripts) {
  TempDir ws;
  std::ostringstream out;
  auto o = options(out, ws.path(), "seeded");
  o.seed = 1234;
  ASSERT_EQ(cli::cmd_mock_run(testing::mock_config_path(), testing::query_path(), testing::early_stop_fixtures_path(), o),
            0)
      << out.str();
  EXPECT_EQ(read_json(ws / "seeded" / "config.json")["seed"], 1234);
}

// --- run against a local OpenAI-style endpoint --------------------------------

// Answers each chat completion from the example fixtures. The config binds
// every role to a model named after the role, so the model field says who is
// asking; replies are served in per-role call order.
class FixtureServer {
 public:
  explicit FixtureServer(llm::Fixtures fixtures) : fixtures_(std::move(fixtures)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      const auto role = body.at("model").get<std::string>();
      std::string reply;
      {
        std::lock_guard lock(mutex_);
        const int idx = counts_[role]++;
        auto it = fixtures_.find({role, idx});
        if (it == fixtures_.end()) {
          res.status = 404;
          return;
        }
        reply = it->second;
        if (role == "Scientist_1" || role == "Coder_1")
          first_messages_[role] = body.at("messages").size();
      }
      res.set_content(json{{"choices", {{{"message", {{"role", "assistant"}, {"content", reply}}}}}}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FixtureServer() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  std::map<std::string, int> counts() {
    std::lock_guard lock(mutex_);
    return counts_;
  }
  std::map<std::string, std::size_t> first_messages_;

 private:
  llm::Fixtures fixtures_;
  std::mutex mutex_;
  std::map<std::string, int> counts_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(Cli, LiveRunAgainstALocalEndpoint) {
  FixtureServer server(testing::example_fixtures());
  TempDir ws;
  auto doc = read_json(testing::mock_config_path());
  for (auto& [role, binding] : doc["agent_models"].items()) binding["model"] = role;
  doc["backend"] = {{"kind", "live"},
                    {"base_url", server.base_url()},
                    {"api_key_env", "HYPOFLOW_TEST_KEY"},
                    {"max_attempts", 1},
                    {"request_timeout", 30}};
  spit(ws / "live.json", doc.dump());

  std::ostringstream missing_key;
  ::unsetenv("HYPOFLOW_TEST_KEY");
  EXPECT_EQ(cli::cmd_run(ws / "live.json", testing::query_path(), options(missing_key, ws.path(), "nokey")),
            cli::kExitInvalid);

  ::setenv("HYPOFLOW_TEST_KEY", "sk-local", 1);
  std::ostringstream out;
  const int code = cli::cmd_run(ws / "live.json", testing::query_path(), options(out, ws.path(), "live"));
  ::unsetenv("HYPOFLOW_TEST_KEY");
  ASSERT_EQ(code, 0) << out.str();
  const auto record = json::parse(out.str());
  EXPECT_EQ(record["status"]["stage"], "Done");
  EXPECT_EQ(record["rounds"].size(), 4u);
  const auto counts = server.counts();
  EXPECT_EQ(counts.at("Refiner_2"), 3);
  EXPECT_EQ(counts.at("Introduction_1"), 1);
  // Generators start fresh: system plus one user message.
  EXPECT_EQ(server.first_messages_.at("Scientist_1"), 2u);
  EXPECT_EQ(server.first_messages_.at("Coder_1"), 2u);
}

}  // namespace
}  // namespace hypoflow
