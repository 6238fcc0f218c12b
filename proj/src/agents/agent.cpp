#include "hypoflow/agents/agent.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "hypoflow/agents/sections.hpp"
#include "hypoflow/core/error.hpp"
#include "hypoflow/core/roles.hpp"
#include "hypoflow/llm/transcript_store.hpp"
#include "hypoflow/sandbox/script.hpp"

namespace hypoflow::agents {

std::string_view to_string(ReflectionDecision decision) {
  switch (decision) {
    case ReflectionDecision::Approved: return "Approved";
    case ReflectionDecision::Revised: return "Revised";
    case ReflectionDecision::Halt: return "Halt";
  }
  return "Unknown";
}

AgentSpec make_agent(const std::string& role, const PromptLibrary& prompts, const RunConfig& config) {
  return AgentSpec{role, roles::is_reflector(role) ? AgentKind::Reflector : AgentKind::Generator, prompts.at(role),
                   config.binding(role)};
}

void validate_roster(const std::vector<AgentSpec>& agents, const std::vector<std::string>& standalone) {
  std::map<std::string, int> generators;
  std::map<std::string, int> reflectors;
  for (const auto& a : agents) {
    if (std::find(standalone.begin(), standalone.end(), a.role) != standalone.end()) continue;
    const auto cut = a.role.rfind('_');
    if (cut == std::string::npos) throw Error(ErrorCode::InvalidConfig, a.role, "role has no pair suffix");
    const auto base = a.role.substr(0, cut);
    (a.kind == AgentKind::Generator ? generators : reflectors)[base]++;
  }
  for (const auto& [base, count] : generators) {
    if (count != 1 || reflectors[base] != 1) throw Error(ErrorCode::InvalidConfig, base + "_1", "unpaired generator");
  }
  for (const auto& [base, count] : reflectors) {
    if (count != 1 || generators[base] != 1) throw Error(ErrorCode::InvalidConfig, base + "_2", "unpaired reflector");
  }
}

bool contains_flag(std::string_view text, std::string_view flag) {
  auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  for (auto pos = text.find(flag); pos != std::string_view::npos; pos = text.find(flag, pos + 1)) {
    const bool left_ok = pos == 0 || !word(text[pos - 1]);
    const auto end = pos + flag.size();
    const bool right_ok = end >= text.size() || !word(text[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

namespace {

bool has_approval_line(std::string_view reply) {
  std::istringstream in{std::string(reply)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    // Tolerate markdown emphasis around the marker.
    while (!t.empty() && (t.front() == '*' || t.front() == '_')) t.erase(t.begin());
    while (!t.empty() && (t.back() == '*' || t.back() == '_')) t.pop_back();
    if (t == kApprovalMarker) return true;
  }
  return false;
}

}  // namespace

ReflectionOutcome classify_reflection(std::string_view role, std::string_view reply,
                                      std::string_view generator_output, const ReflectionPolicy& policy) {
  ReflectionOutcome out;
  out.reply = std::string(reply);
  if (policy.allow_halt && contains_flag(reply, kNoFollowUpFlag)) {
    out.decision = ReflectionDecision::Halt;
    out.payload = std::string(kNoFollowUpFlag);
    return out;
  }
  if (reply == generator_output) {
    out.decision = ReflectionDecision::Approved;
    return out;
  }
  for (auto& block : sandbox::fenced_blocks(reply)) {
    if (trim(block.body).empty()) continue;
    out.decision = ReflectionDecision::Revised;
    out.payload = std::move(block.body);
    return out;
  }
  try {
    parse_idea(reply);
    out.decision = ReflectionDecision::Revised;
    out.payload = std::string(reply);
    return out;
  } catch (const Error&) {
  }
  if (has_approval_line(reply)) {
    out.decision = ReflectionDecision::Approved;
    return out;
  }
  throw Error(ErrorCode::UnparseableReflection, std::string(role), "reply matches no classification rule");
}

AgentRunner::AgentRunner(llm::Backend& backend, const RunStore* store) : backend_(backend), store_(store) {}

int AgentRunner::next_index(const std::string& role) {
  std::lock_guard lock(mutex_);
  auto it = counters_.find(role);
  if (it == counters_.end()) it = counters_.emplace(role, store_ ? store_->next_call_index(role) : 0).first;
  return it->second++;
}

GenerationResult AgentRunner::invoke(const AgentSpec& agent, const Bindings& bindings, const llm::Transcript& history,
                                     PromptVariant variant, const std::vector<std::string>& attachments) {
  if (agent.kind == AgentKind::Generator && !history.empty())
    throw Error(ErrorCode::ProtocolError, agent.role, "generators must start from an empty history");
  if (agent.kind == AgentKind::Reflector) {
    if (history.empty() || history.back().role != llm::MessageRole::Assistant)
      throw Error(ErrorCode::ProtocolError, agent.role, "reflectors need a complete partner transcript");
  }
  const PromptTemplate* prompt_template = &agent.templates.prompt;
  if (variant == PromptVariant::Repair) {
    if (!agent.templates.repair) throw Error(ErrorCode::InvalidConfig, agent.role, "no [repair] template");
    prompt_template = &*agent.templates.repair;
  }

  llm::ChatRequest request;
  request.agent_role = agent.role;
  request.system_message = render_prompt(agent.templates.system, bindings);
  request.prompt = render_prompt(*prompt_template, bindings);
  request.prompt_attachments = attachments;
  request.model = agent.binding.model;
  request.temperature = agent.binding.temperature;
  request.reasoning_effort = agent.binding.reasoning_effort;
  request.msg_history = history;
  const int index = next_index(agent.role);
  request.call_index = index;

  auto response = llm::complete(backend_, request);
  if (store_) llm::record_transcript(*store_, agent.role, index, request, response);
  return GenerationResult{std::move(response.text), std::move(response.transcript), index};
}

GenerationResult AgentRunner::run_generation(const AgentSpec& agent, const Bindings& bindings,
                                             const std::vector<std::string>& attachments) {
  if (agent.kind != AgentKind::Generator)
    throw Error(ErrorCode::ProtocolError, agent.role, "run_generation needs a generator");
  return invoke(agent, bindings, {}, PromptVariant::Primary, attachments);
}

ReflectionOutcome AgentRunner::run_reflection(const AgentSpec& agent, const llm::Transcript& partner_transcript,
                                              const Bindings& bindings, const ReflectionPolicy& policy,
                                              PromptVariant variant) {
  if (agent.kind != AgentKind::Reflector)
    throw Error(ErrorCode::ProtocolError, agent.role, "run_reflection needs a reflector");
  auto result = invoke(agent, bindings, partner_transcript, variant);
  const std::string& generator_output = partner_transcript.back().content;
  auto outcome = classify_reflection(agent.role, result.output, generator_output, policy);
  outcome.transcript = std::move(result.transcript);
  outcome.call_index = result.call_index;
  return outcome;
}

}  // namespace hypoflow::agents
