#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "argplan/prompt.hpp"

namespace argplan {

/// Chat-completion backend. Implementations must allow concurrent complete() calls.
class LlmProvider {
 public:
  virtual ~LlmProvider() = default;

  /// Returns the assistant message text. Throws ProviderError.
  virtual std::string complete(const RenderedPrompt& prompt) = 0;
};

/// SHA-256 over a canonical JSON encoding of task name, role/content pairs
/// and the temperature printed with three decimals.
std::string fingerprint(const RenderedPrompt& prompt);

/// fingerprint -> response map persisted as a sorted-key JSON object.
class ReplayStore {
 public:
  ReplayStore() = default;
  ReplayStore(ReplayStore&& other) noexcept;
  ReplayStore& operator=(ReplayStore&&) = delete;

  /// Throws DuplicateFingerprint when a different response is already
  /// stored and `overwrite` is false. Re-recording an identical pair is a no-op.
  void record(const RenderedPrompt& prompt, std::string response, bool overwrite = false);
  void record_fingerprint(const std::string& fp, std::string response, bool overwrite = false);

  std::optional<std::string> lookup(const std::string& fp) const;
  std::size_t size() const;
  std::map<std::string, std::string> entries() const;

  static ReplayStore load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  std::string serialize() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> responses_;
};

class ReplayProvider : public LlmProvider {
 public:
  /// Strict: a miss is ReplayMiss. Record: a miss is forwarded to `fallback`
  /// and the answer stored (needs a fallback; otherwise behaves as Strict).
  enum class Mode { Strict, Record };

  explicit ReplayProvider(std::shared_ptr<ReplayStore> store, Mode mode = Mode::Strict,
                          std::shared_ptr<LlmProvider> fallback = nullptr);

  std::string complete(const RenderedPrompt& prompt) override;

  const std::shared_ptr<ReplayStore>& store() const { return store_; }

 private:
  std::shared_ptr<ReplayStore> store_;
  Mode mode_;
  std::shared_ptr<LlmProvider> fallback_;
};

}  // namespace argplan
