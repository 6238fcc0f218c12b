#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace hypoflow {

enum class Stage { Ideation, InitialTesting, Refinement, Documentation, Done, Failed };

enum class StageEvent {
  IdeaAccepted,
  InitialTestCompleted,
  FollowUpRequested,
  NoFollowUp,
  BudgetExhausted,
  DocumentationCompleted,
  Failure,
};

std::string_view to_string(Stage stage);
std::string_view to_string(StageEvent event);

// Position of a run in the fixed stage order
//   Ideation -> InitialTesting -> Refinement(0..n_test) -> Documentation -> Done
// with Failed reachable from every non-terminal stage. In Refinement(k) rounds
// 0..k have been executed and the refiners decide whether round k+1 happens.
struct RunState {
  Stage stage = Stage::Ideation;
  int refinement_round = 0;  // k, meaningful only in Refinement
  int rounds_completed = 0;
  int n_test = 0;
  std::string failure_reason;

  static RunState initial(int n_test);

  bool terminal() const { return stage == Stage::Done || stage == Stage::Failed; }
  std::string label() const;  // "Refinement(2)", "Failed(reason)", ...

  bool operator==(const RunState&) const = default;
};

// Returns the successor state. Throws Error(IllegalTransition) when the event
// is not legal in the current stage.
RunState advance(const RunState& state, StageEvent event, const std::string& reason = {});

void to_json(nlohmann::json& j, const RunState& s);
void from_json(const nlohmann::json& j, RunState& s);

}  // namespace hypoflow
