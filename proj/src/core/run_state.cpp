#include "hypoflow/core/run_state.hpp"

#include "hypoflow/core/error.hpp"

namespace hypoflow {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Ideation: return "Ideation";
    case Stage::InitialTesting: return "InitialTesting";
    case Stage::Refinement: return "Refinement";
    case Stage::Documentation: return "Documentation";
    case Stage::Done: return "Done";
    case Stage::Failed: return "Failed";
  }
  return "Unknown";
}

std::string_view to_string(StageEvent event) {
  switch (event) {
    case StageEvent::IdeaAccepted: return "IdeaAccepted";
    case StageEvent::InitialTestCompleted: return "InitialTestCompleted";
    case StageEvent::FollowUpRequested: return "FollowUpRequested";
    case StageEvent::NoFollowUp: return "NoFollowUp";
    case StageEvent::BudgetExhausted: return "BudgetExhausted";
    case StageEvent::DocumentationCompleted: return "DocumentationCompleted";
    case StageEvent::Failure: return "Failure";
  }
  return "Unknown";
}

RunState RunState::initial(int n_test) {
  RunState s;
  s.n_test = n_test;
  return s;
}

std::string RunState::label() const {
  std::string out(to_string(stage));
  if (stage == Stage::Refinement) out += "(" + std::to_string(refinement_round) + ")";
  if (stage == Stage::Failed) out += "(" + failure_reason + ")";
  return out;
}

RunState advance(const RunState& state, StageEvent event, const std::string& reason) {
  auto illegal = [&] {
    return Error(ErrorCode::IllegalTransition, state.label() + "," + std::string(to_string(event)));
  };
  if (state.terminal()) throw illegal();

  RunState next = state;
  if (event == StageEvent::Failure) {
    next.stage = Stage::Failed;
    next.failure_reason = reason.empty() ? "unspecified failure" : reason;
    return next;
  }

  switch (state.stage) {
    case Stage::Ideation:
      if (event != StageEvent::IdeaAccepted) throw illegal();
      next.stage = Stage::InitialTesting;
      return next;
    case Stage::InitialTesting:
      if (event != StageEvent::InitialTestCompleted) throw illegal();
      next.stage = Stage::Refinement;
      next.refinement_round = 0;
      next.rounds_completed = 1;
      return next;
    case Stage::Refinement: {
      const int k = state.refinement_round;
      if (event == StageEvent::NoFollowUp) {
        next.stage = Stage::Documentation;
        return next;
      }
      if (event == StageEvent::BudgetExhausted) {
        if (k < state.n_test) throw illegal();
        next.stage = Stage::Documentation;
        return next;
      }
      if (event == StageEvent::FollowUpRequested) {
        if (k + 1 > state.n_test) {
          next.stage = Stage::Documentation;
          return next;
        }
        next.refinement_round = k + 1;
        next.rounds_completed = k + 2;
        return next;
      }
      throw illegal();
    }
    case Stage::Documentation:
      if (event != StageEvent::DocumentationCompleted) throw illegal();
      next.stage = Stage::Done;
      return next;
    case Stage::Done:
    case Stage::Failed:
      break;
  }
  throw illegal();
}

void to_json(nlohmann::json& j, const RunState& s) {
  j = nlohmann::json{{"stage", std::string(to_string(s.stage))},
                     {"label", s.label()},
                     {"refinement_round", s.refinement_round},
                     {"rounds_completed", s.rounds_completed},
                     {"n_test", s.n_test}};
  if (s.stage == Stage::Failed) j["failure_reason"] = s.failure_reason;
}

void from_json(const nlohmann::json& j, RunState& s) {
  const auto stage = j.at("stage").get<std::string>();
  static constexpr Stage all[] = {Stage::Ideation,      Stage::InitialTesting, Stage::Refinement,
                                  Stage::Documentation, Stage::Done,           Stage::Failed};
  bool found = false;
  for (auto candidate : all) {
    if (to_string(candidate) == stage) {
      s.stage = candidate;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::InvalidConfig, "stage", "unknown stage " + stage);
  s.refinement_round = j.value("refinement_round", 0);
  s.rounds_completed = j.value("rounds_completed", 0);
  s.n_test = j.value("n_test", 0);
  s.failure_reason = j.value("failure_reason", "");
}

}  // namespace hypoflow
