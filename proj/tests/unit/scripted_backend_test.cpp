#include <algorithm>
#include <numeric>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "hypoflow/llm/scripted_backend.hpp"
#include "hypoflow/llm/transcript_store.hpp"
#include "test_support.hpp"

namespace hypoflow::llm {
namespace {

ChatRequest request(const std::string& role, Transcript history = {}) {
  ChatRequest r;
  r.agent_role = role;
  r.system_message = "You are " + role + ".";
  r.prompt = "Do the task.";
  r.model = "m";
  r.msg_history = std::move(history);
  return r;
}

TEST(ScriptedBackend, ServesFixtureVerbatim) {
  ScriptedBackend backend({{{"Scientist_1", 0}, "Idea: x\n  trailing  "}});
  const auto resp = complete(backend, request("Scientist_1"));
  EXPECT_EQ(resp.text, "Idea: x\n  trailing  ");
  EXPECT_EQ(resp.backend_tag, BackendTag::Scripted);
}

TEST(ScriptedBackend, EmptyHistoryGivesThreeMessages) {
  ScriptedBackend backend({{{"Coder_1", 0}, "reply"}});
  const auto resp = complete(backend, request("Coder_1"));
  ASSERT_EQ(resp.transcript.size(), 3u);
  EXPECT_EQ(resp.transcript[0].role, MessageRole::System);
  EXPECT_EQ(resp.transcript[1].role, MessageRole::User);
  EXPECT_EQ(resp.transcript[2].role, MessageRole::Assistant);
  EXPECT_EQ(resp.transcript[2].content, "reply");
}

TEST(ScriptedBackend, TranscriptGrowsByTwoWithHistory) {
  ScriptedBackend backend({{{"Coder_1", 0}, "draft"}, {{"Coder_2", 0}, "APPROVED"}});
  const auto gen = complete(backend, request("Coder_1"));
  const auto history = gen.transcript;
  const auto ref = complete(backend, request("Coder_2", gen.transcript));
  EXPECT_EQ(ref.transcript.size(), gen.transcript.size() + 2);
  EXPECT_TRUE(std::equal(gen.transcript.begin(), gen.transcript.end(), ref.transcript.begin()));
  EXPECT_EQ(ref.transcript[3].role, MessageRole::User);
  EXPECT_EQ(history, gen.transcript);
}

TEST(ScriptedBackend, ReplayIsByteIdentical) {
  const Fixtures fx{{{"A_1", 0}, "one"}, {{"A_1", 1}, "two"}, {{"B_1", 0}, "three"}};
  auto run = [&] {
    ScriptedBackend backend(fx);
    std::string out;
    for (const auto* role : {"A_1", "B_1", "A_1"}) out += json(complete(backend, request(role)).transcript).dump();
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(ScriptedBackend, ExhaustionAndEmptyMap) {
  ScriptedBackend backend({{{"R_1", 0}, "a"}, {{"R_1", 1}, "b"}});
  complete(backend, request("R_1"));
  complete(backend, request("R_1"));
  EXPECT_HF_ERROR(complete(backend, request("R_1")), ErrorCode::FixtureMiss, "R_1:2");
  ScriptedBackend empty({});
  EXPECT_HF_ERROR(complete(empty, request("Scientist_1")), ErrorCode::FixtureMiss, "Scientist_1:0");
}

TEST(ScriptedBackend, ExplicitCallIndexWins) {
  ScriptedBackend backend({{{"R_1", 0}, "a"}, {{"R_1", 1}, "b"}});
  auto r = request("R_1");
  r.call_index = 1;
  EXPECT_EQ(complete(backend, r).text, "b");
}

TEST(ScriptedBackend, AnyInterleavingPreservesPerRoleOrder) {
  const std::vector<std::string> roles = {"A_1", "B_1", "C_2"};
  Fixtures fx;
  for (const auto& role : roles)
    for (int i = 0; i < 4; ++i) fx[{role, i}] = role + "#" + std::to_string(i);
  std::vector<std::string> sequence;
  for (const auto& role : roles) sequence.insert(sequence.end(), 4, role);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::shuffle(sequence.begin(), sequence.end(), rng);
    ScriptedBackend backend(fx);
    std::map<std::string, int> seen;
    for (const auto& role : sequence) {
      const auto history = role.back() == '2' ? Transcript{{MessageRole::System, "s", {}}} : Transcript{};
      EXPECT_EQ(complete(backend, request(role, history)).text, role + "#" + std::to_string(seen[role]++));
    }
    std::map<std::string, int> expected;
    for (const auto& call : backend.call_log()) EXPECT_EQ(call.index, expected[call.role]++);
  }
}

TEST(ScriptedBackend, ConcurrentCallsKeepPerRoleOrder) {
  Fixtures fx;
  for (int i = 0; i < 50; ++i) fx[{"W_1", i}] = std::to_string(i);
  ScriptedBackend backend(fx);
  std::vector<std::thread> threads;
  for (int t = 0; t < 5; ++t)
    threads.emplace_back([&] {
      for (int i = 0; i < 10; ++i) complete(backend, request("W_1"));
    });
  for (auto& t : threads) t.join();
  std::vector<int> indices;
  for (const auto& call : backend.call_log()) indices.push_back(call.index);
  std::vector<int> expected(50);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(indices, expected);
}

TEST(ScriptedBackend, LoadsShippedFixtures) {
  const auto fx = testing::example_fixtures();
  EXPECT_EQ(fx.count({"Refiner_1", 2}), 1u);
  EXPECT_EQ(fx.count({"Refiner_1", 3}), 0u);
  EXPECT_EQ(fx.count({"Plot_Analyzer", 1}), 1u);
  EXPECT_NE(fx.at({"Scientist_2", 0}).find("APPROVED"), std::string::npos);
}

TEST(ChatRequest, Validation) {
  auto r = request("X_1");
  r.prompt = " ";
  EXPECT_HF_ERROR(r.validate(), ErrorCode::InvalidRequest, "X_1");
  r = request("X_1");
  r.temperature = 3;
  EXPECT_HF_CODE(r.validate(), ErrorCode::InvalidRequest);
  r = request("X_1", {{MessageRole::User, "hi", {}}});
  EXPECT_HF_CODE(r.validate(), ErrorCode::InvalidRequest);
  r = request("X_1", {{MessageRole::System, "s", {}}});
  EXPECT_NO_THROW(r.validate());
}

TEST(ChatMessage, AttachmentOnlyMessageIsValidJson) {
  const ChatMessage m{MessageRole::User, "", {"/tmp/a.png"}};
  EXPECT_EQ(json(m).get<ChatMessage>(), m);
}

class TranscriptStoreTest : public ::testing::Test {
 protected:
  testing::TempDir dir;
  RunStore store{dir.path()};
  ScriptedBackend backend{{{{"Coder_1", 0}, "x"}, {{"Coder_1", 1}, "y"}}};
};

TEST_F(TranscriptStoreTest, WritesParseableFile) {
  const auto req = request("Coder_1");
  const auto resp = complete(backend, req);
  const auto path = record_transcript(store, "Coder_1", 0, req, resp);
  EXPECT_EQ(path, dir / "transcripts/Coder_1_0.json");
  const auto doc = read_json(path);
  EXPECT_EQ(doc.at("role"), "Coder_1");
  EXPECT_EQ(doc.at("index"), 0);
  EXPECT_EQ(doc.at("model"), "m");
  EXPECT_TRUE(doc.contains("temperature"));
  EXPECT_TRUE(doc.contains("usage"));
  EXPECT_EQ(load_transcript(path), resp.transcript);
}

TEST_F(TranscriptStoreTest, IdenticalRewriteIsNoOp) {
  const auto req = request("Coder_1");
  const auto resp = complete(backend, req);
  record_transcript(store, "Coder_1", 0, req, resp);
  EXPECT_NO_THROW(record_transcript(store, "Coder_1", 0, req, resp));
  EXPECT_EQ(std::distance(fs::directory_iterator(store.transcripts_dir()), fs::directory_iterator{}), 1);
}

TEST_F(TranscriptStoreTest, DifferentContentConflicts) {
  const auto req = request("Coder_1");
  const auto first = complete(backend, req);
  const auto second = complete(backend, req);
  const auto path = record_transcript(store, "Coder_1", 0, req, first);
  const auto before = testing::slurp(path);
  EXPECT_HF_ERROR(record_transcript(store, "Coder_1", 0, req, second), ErrorCode::ConflictError, "Coder_1_0.json");
  EXPECT_EQ(testing::slurp(path), before);
}

}  // namespace
}  // namespace hypoflow::llm
