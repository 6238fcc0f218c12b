#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypoflow {

enum class ErrorCode {
  InvalidQuery,
  InvalidIdea,
  InvalidTool,
  DuplicateTool,
  InvalidConfig,
  MissingRoleBinding,
  InvalidTemperature,
  InvalidReasoningEffort,
  NonPositiveTimeout,
  WorkspaceUnwritable,
  RunAlreadyExists,
  RunLocked,
  NotARunDirectory,
  IllegalTransition,
  InvalidRequest,
  TransportError,
  BackendRefused,
  FixtureMiss,
  StoreUnwritable,
  ConflictError,
  UnboundPlaceholder,
  ProtocolError,
  UnparseableReflection,
  MissingField,
  DuplicateField,
  NoCodeBlock,
  SpawnFailure,
  MissingArtifact,
  MalformedArtifact,
  ScriptFailed,
  Timeout,
  SandboxViolation,
  ContinuityViolation,
  RegistryViolation,
  RepairFailed,
  MissingHighlightBox,
  MissingSection,
  PreconditionFailed,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the engine. `subject` names the offending entity
// (role, field, file name, placeholder) so callers and tests can match on it
// without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& detail = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace hypoflow
