#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace argplan {

enum class ErrorCode {
  EmptyArgument,
  UnknownNode,
  UnknownPlan,
  UnknownCascade,
  RootEdgeForbidden,
  CycleForbidden,
  RootRemovalForbidden,
  IndexOutOfRange,
  InvalidArgument,
  MissingSlot,
  ParseFailure,
  NoDraft,
  RootDraftForbidden,
  StepNotPending,
  Conflict,
  SchemaError,
  IoError,
  DuplicateFingerprint,
  ProviderTimeout,
  ProviderHttpError,
  ReplayMiss,
};

/// Broad classes used by the CLI exit codes and the HTTP status mapping.
enum class ErrorCategory { Validation, NotFound, Conflict, Provider, Storage };

std::string_view error_code_name(ErrorCode code);
ErrorCategory category_of(ErrorCode code);
/// "validation", "not_found", "conflict", "provider" or "storage".
std::string_view category_name(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

/// Failure talking to a completion backend. `http_status` is 0 for transport
/// failures; `fingerprint` is set for replay misses.
class ProviderError : public Error {
 public:
  ProviderError(ErrorCode code, const std::string& message, int http_status = 0,
                std::string fingerprint = {})
      : Error(code, message), http_status_(http_status), fingerprint_(std::move(fingerprint)) {}

  int http_status() const noexcept { return http_status_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  int http_status_;
  std::string fingerprint_;
};

/// Thrown when batch generation stops at a provider failure. Drafts for
/// `processed()` were already stored in the plan.
class GenerationInterrupted : public ProviderError {
 public:
  GenerationInterrupted(const ProviderError& cause, std::vector<std::string> processed,
                        std::string failed_node)
      : ProviderError(cause.code(),
                      "generation stopped at node " + failed_node + ": " + cause.what(),
                      cause.http_status(), cause.fingerprint()),
        processed_(std::move(processed)),
        failed_node_(std::move(failed_node)) {}

  const std::vector<std::string>& processed() const noexcept { return processed_; }
  const std::string& failed_node() const noexcept { return failed_node_; }

 private:
  std::vector<std::string> processed_;
  std::string failed_node_;
};

}  // namespace argplan
