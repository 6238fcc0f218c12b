#include "hypoflow/core/error.hpp"

namespace hypoflow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::InvalidIdea: return "InvalidIdea";
    case ErrorCode::InvalidTool: return "InvalidTool";
    case ErrorCode::DuplicateTool: return "DuplicateTool";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MissingRoleBinding: return "MissingRoleBinding";
    case ErrorCode::InvalidTemperature: return "InvalidTemperature";
    case ErrorCode::InvalidReasoningEffort: return "InvalidReasoningEffort";
    case ErrorCode::NonPositiveTimeout: return "NonPositiveTimeout";
    case ErrorCode::WorkspaceUnwritable: return "WorkspaceUnwritable";
    case ErrorCode::RunAlreadyExists: return "RunAlreadyExists";
    case ErrorCode::RunLocked: return "RunLocked";
    case ErrorCode::NotARunDirectory: return "NotARunDirectory";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::BackendRefused: return "BackendRefused";
    case ErrorCode::FixtureMiss: return "FixtureMiss";
    case ErrorCode::StoreUnwritable: return "StoreUnwritable";
    case ErrorCode::ConflictError: return "ConflictError";
    case ErrorCode::UnboundPlaceholder: return "UnboundPlaceholder";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::UnparseableReflection: return "UnparseableReflection";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::DuplicateField: return "DuplicateField";
    case ErrorCode::NoCodeBlock: return "NoCodeBlock";
    case ErrorCode::SpawnFailure: return "SpawnFailure";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::MalformedArtifact: return "MalformedArtifact";
    case ErrorCode::ScriptFailed: return "ScriptFailed";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::SandboxViolation: return "SandboxViolation";
    case ErrorCode::ContinuityViolation: return "ContinuityViolation";
    case ErrorCode::RegistryViolation: return "RegistryViolation";
    case ErrorCode::RepairFailed: return "RepairFailed";
    case ErrorCode::MissingHighlightBox: return "MissingHighlightBox";
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& subject, const std::string& detail) {
  std::string out(to_string(code));
  if (!subject.empty()) out += "(" + subject + ")";
  if (!detail.empty()) out += ": " + detail;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string subject, const std::string& detail)
    : std::runtime_error(format_message(code, subject, detail)), code_(code), subject_(std::move(subject)) {}

}  // namespace hypoflow
