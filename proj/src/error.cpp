#include "argplan/error.hpp"

namespace argplan {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyArgument: return "empty_argument";
    case ErrorCode::UnknownNode: return "unknown_node";
    case ErrorCode::UnknownPlan: return "unknown_plan";
    case ErrorCode::UnknownCascade: return "unknown_cascade";
    case ErrorCode::RootEdgeForbidden: return "root_edge_forbidden";
    case ErrorCode::CycleForbidden: return "cycle_forbidden";
    case ErrorCode::RootRemovalForbidden: return "root_removal_forbidden";
    case ErrorCode::IndexOutOfRange: return "index_out_of_range";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::MissingSlot: return "missing_slot";
    case ErrorCode::ParseFailure: return "parse_failure";
    case ErrorCode::NoDraft: return "no_draft";
    case ErrorCode::RootDraftForbidden: return "root_draft_forbidden";
    case ErrorCode::StepNotPending: return "step_not_pending";
    case ErrorCode::Conflict: return "conflict";
    case ErrorCode::SchemaError: return "schema_error";
    case ErrorCode::IoError: return "io_error";
    case ErrorCode::DuplicateFingerprint: return "duplicate_fingerprint";
    case ErrorCode::ProviderTimeout: return "provider_timeout";
    case ErrorCode::ProviderHttpError: return "provider_http_error";
    case ErrorCode::ReplayMiss: return "replay_miss";
  }
  return "unknown";
}

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Validation: return "validation";
    case ErrorCategory::NotFound: return "not_found";
    case ErrorCategory::Conflict: return "conflict";
    case ErrorCategory::Provider: return "provider";
    case ErrorCategory::Storage: return "storage";
  }
  return "validation";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownNode:
    case ErrorCode::UnknownPlan:
    case ErrorCode::UnknownCascade:
      return ErrorCategory::NotFound;
    case ErrorCode::RootEdgeForbidden:
    case ErrorCode::CycleForbidden:
    case ErrorCode::RootRemovalForbidden:
    case ErrorCode::NoDraft:
    case ErrorCode::RootDraftForbidden:
    case ErrorCode::StepNotPending:
    case ErrorCode::Conflict:
    case ErrorCode::DuplicateFingerprint:
      return ErrorCategory::Conflict;
    // A malformed completion is the backend's fault, not the caller's.
    case ErrorCode::ParseFailure:
    case ErrorCode::ProviderTimeout:
    case ErrorCode::ProviderHttpError:
    case ErrorCode::ReplayMiss:
      return ErrorCategory::Provider;
    case ErrorCode::SchemaError:
    case ErrorCode::IoError:
      return ErrorCategory::Storage;
    case ErrorCode::EmptyArgument:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::InvalidArgument:
    case ErrorCode::MissingSlot:
      return ErrorCategory::Validation;
  }
  return ErrorCategory::Validation;
}

}  // namespace argplan
