#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hypoflow/agents/prompt_template.hpp"
#include "hypoflow/core/config.hpp"
#include "hypoflow/core/run_store.hpp"
#include "hypoflow/llm/backend.hpp"

namespace hypoflow::agents {

enum class AgentKind { Generator, Reflector };

struct AgentSpec {
  std::string role;
  AgentKind kind = AgentKind::Generator;
  RoleTemplates templates;
  ModelBinding binding;
};

AgentSpec make_agent(const std::string& role, const PromptLibrary& prompts, const RunConfig& config);

// Checks that every generator has exactly one reflector partner and vice
// versa ("X_1" <-> "X_2"). Roles listed in `standalone` are exempt.
void validate_roster(const std::vector<AgentSpec>& agents, const std::vector<std::string>& standalone = {});

enum class ReflectionDecision { Approved, Revised, Halt };

std::string_view to_string(ReflectionDecision decision);

struct ReflectionOutcome {
  ReflectionDecision decision = ReflectionDecision::Approved;
  std::string payload;  // revised text for Revised, "NO_FOLLOWUP" for Halt
  std::string reply;    // raw reflector reply
  llm::Transcript transcript;
  int call_index = 0;
};

struct ReflectionPolicy {
  // Only refinement-stage reflectors may halt the loop.
  bool allow_halt = false;
};

inline constexpr std::string_view kNoFollowUpFlag = "NO_FOLLOWUP";
inline constexpr std::string_view kApprovalMarker = "APPROVED";

bool contains_flag(std::string_view text, std::string_view flag);

// Classification, first match wins:
//   1. NO_FOLLOWUP token (when allowed)         -> Halt
//   2. reply byte-equal to the generator output -> Approved
//   3. a fenced code block                      -> Revised(block body)
//   4. all eight idea headers                   -> Revised(reply)
//   5. a line reading exactly APPROVED          -> Approved
// Anything else throws UnparseableReflection(role).
ReflectionOutcome classify_reflection(std::string_view role, std::string_view reply,
                                      std::string_view generator_output, const ReflectionPolicy& policy);

struct GenerationResult {
  std::string output;
  llm::Transcript transcript;
  int call_index = 0;
};

enum class PromptVariant { Primary, Repair };

// Runs agent calls against a backend, numbers them per role and persists each
// transcript into the run store (when one is attached). Thread-safe.
class AgentRunner {
 public:
  AgentRunner(llm::Backend& backend, const RunStore* store);

  // One completion. Generators must receive an empty history and reflectors
  // a complete partner transcript; anything else is a ProtocolError.
  GenerationResult invoke(const AgentSpec& agent, const Bindings& bindings, const llm::Transcript& history,
                          PromptVariant variant = PromptVariant::Primary,
                          const std::vector<std::string>& attachments = {});

  GenerationResult run_generation(const AgentSpec& agent, const Bindings& bindings,
                                  const std::vector<std::string>& attachments = {});

  ReflectionOutcome run_reflection(const AgentSpec& agent, const llm::Transcript& partner_transcript,
                                   const Bindings& bindings, const ReflectionPolicy& policy = {},
                                   PromptVariant variant = PromptVariant::Primary);

 private:
  int next_index(const std::string& role);

  llm::Backend& backend_;
  const RunStore* store_;
  std::mutex mutex_;
  std::map<std::string, int> counters_;
};

}  // namespace hypoflow::agents
