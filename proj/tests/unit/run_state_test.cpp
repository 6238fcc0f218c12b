#include <random>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "hypoflow/core/run_state.hpp"

namespace hypoflow {
namespace {

RunState refinement(int k, int n_test) {
  auto s = RunState::initial(n_test);
  s = advance(s, StageEvent::IdeaAccepted);
  s = advance(s, StageEvent::InitialTestCompleted);
  for (int i = 0; i < k; ++i) s = advance(s, StageEvent::FollowUpRequested);
  return s;
}

int order(Stage s) {
  switch (s) {
    case Stage::Ideation: return 0;
    case Stage::InitialTesting: return 1;
    case Stage::Refinement: return 2;
    case Stage::Documentation: return 3;
    case Stage::Done: return 4;
    case Stage::Failed: return 5;
  }
  return -1;
}

TEST(RunState, IdeaAcceptedLeadsToInitialTesting) {
  EXPECT_EQ(advance(RunState::initial(3), StageEvent::IdeaAccepted).stage, Stage::InitialTesting);
}

TEST(RunState, FollowUpPastBudgetGoesToDocumentation) {
  const auto s = refinement(3, 3);
  ASSERT_EQ(s.label(), "Refinement(3)");
  EXPECT_EQ(s.rounds_completed, 4);
  const auto next = advance(s, StageEvent::FollowUpRequested);
  EXPECT_EQ(next.stage, Stage::Documentation);
  EXPECT_EQ(next.rounds_completed, 4);
}

TEST(RunState, IllegalTransitionNamesStageAndEvent) {
  auto s = refinement(0, 0);
  s = advance(s, StageEvent::NoFollowUp);
  ASSERT_EQ(s.stage, Stage::Documentation);
  EXPECT_HF_ERROR(advance(s, StageEvent::IdeaAccepted), ErrorCode::IllegalTransition, "Documentation,IdeaAccepted");
}

TEST(RunState, BudgetExhaustedOnlyAtBudget) {
  EXPECT_HF_CODE(advance(refinement(1, 3), StageEvent::BudgetExhausted), ErrorCode::IllegalTransition);
  EXPECT_EQ(advance(refinement(3, 3), StageEvent::BudgetExhausted).stage, Stage::Documentation);
}

TEST(RunState, FailureFromEveryNonTerminalStage) {
  std::vector<RunState> states = {RunState::initial(2), advance(RunState::initial(2), StageEvent::IdeaAccepted),
                                  refinement(1, 2), advance(refinement(2, 2), StageEvent::NoFollowUp)};
  for (const auto& s : states) {
    const auto failed = advance(s, StageEvent::Failure, "boom");
    EXPECT_EQ(failed.stage, Stage::Failed);
    EXPECT_EQ(failed.label(), "Failed(boom)");
  }
  auto failed = advance(RunState::initial(1), StageEvent::Failure, "x");
  EXPECT_HF_CODE(advance(failed, StageEvent::Failure, "y"), ErrorCode::IllegalTransition);
}

TEST(RunState, JsonRoundTrip) {
  for (const auto& s : {refinement(2, 3), advance(RunState::initial(1), StageEvent::Failure, "why")})
    EXPECT_EQ(nlohmann::json(s).get<RunState>(), s);
}

TEST(RunState, RandomEventSequencesRespectBudgetAndOrder) {
  std::mt19937 rng(12345);
  const StageEvent events[] = {StageEvent::IdeaAccepted,      StageEvent::InitialTestCompleted,
                               StageEvent::FollowUpRequested, StageEvent::NoFollowUp,
                               StageEvent::BudgetExhausted,   StageEvent::DocumentationCompleted,
                               StageEvent::Failure};
  std::uniform_int_distribution<int> pick(0, 6), budget(0, 5);
  for (int trial = 0; trial < 5000; ++trial) {
    auto s = RunState::initial(budget(rng));
    for (int step = 0; step < 40 && !s.terminal(); ++step) {
      const auto event = events[pick(rng)];
      if (event == StageEvent::Failure && pick(rng) != 0) continue;
      RunState next;
      try {
        next = advance(s, event, "fuzz");
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::IllegalTransition);
        continue;
      }
      ASSERT_GE(order(next.stage), order(s.stage));
      if (next.stage == s.stage && s.stage == Stage::Refinement) {
        ASSERT_EQ(next.refinement_round, s.refinement_round + 1);
      }
      ASSERT_LE(next.rounds_completed, 1 + next.n_test);
      s = next;
    }
  }
}

}  // namespace
}  // namespace hypoflow
