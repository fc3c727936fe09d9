#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>

#include "argplan/prompt.hpp"
#include "argplan/provider.hpp"

namespace argplan {

struct ServiceConfig {
  /// Directory holding one <plan id>.plan.json per plan; created if missing.
  std::filesystem::path store_dir;
  std::shared_ptr<LlmProvider> provider;
  PromptSettings settings{};
  /// Cascade sessions untouched for this long are dropped.
  std::chrono::seconds cascade_ttl = std::chrono::minutes(30);
};

/// JSON-over-HTTP facade for the engine. Requests for different plans run
/// concurrently; mutations of one plan are serialized by that plan's lock, and
/// completions run without holding it.
class Service {
 public:
  /// Loads every plan file in the store directory. Throws Error(IoError or
  /// SchemaError) when the store cannot be read.
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the listening socket; port 0 picks a free one. Returns the bound
  /// port. Throws Error(IoError) when the address is unavailable.
  int bind(const std::string& host, int port);

  /// Serves until stop(). Requires a prior bind().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace argplan
