#include "argplan/provider.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "argplan/error.hpp"
#include "argplan/hash.hpp"
#include "argplan/io.hpp"

namespace argplan {

std::string fingerprint(const RenderedPrompt& prompt) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : prompt.messages) {
    messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }
  char temperature[32];
  std::snprintf(temperature, sizeof temperature, "%.3f", prompt.temperature);
  const nlohmann::json canonical = {
      {"task", task_name(prompt.task)},
      {"messages", std::move(messages)},
      {"temperature", temperature},
  };
  return sha256_hex(canonical.dump());
}

void ReplayStore::record(const RenderedPrompt& prompt, std::string response, bool overwrite) {
  record_fingerprint(fingerprint(prompt), std::move(response), overwrite);
}

void ReplayStore::record_fingerprint(const std::string& fp, std::string response, bool overwrite) {
  std::lock_guard lock(mutex_);
  auto it = responses_.find(fp);
  if (it != responses_.end() && !overwrite) {
    if (it->second == response) return;
    throw Error(ErrorCode::DuplicateFingerprint, "replay store already has fingerprint " + fp);
  }
  responses_[fp] = std::move(response);
}

std::optional<std::string> ReplayStore::lookup(const std::string& fp) const {
  std::lock_guard lock(mutex_);
  auto it = responses_.find(fp);
  if (it == responses_.end()) return std::nullopt;
  return it->second;
}

std::size_t ReplayStore::size() const {
  std::lock_guard lock(mutex_);
  return responses_.size();
}

std::map<std::string, std::string> ReplayStore::entries() const {
  std::lock_guard lock(mutex_);
  return responses_;
}

std::string ReplayStore::serialize() const {
  nlohmann::json doc = nlohmann::json::object();
  {
    std::lock_guard lock(mutex_);
    for (const auto& [fp, response] : responses_) doc[fp] = response;
  }
  return doc.dump(2) + "\n";
}

ReplayStore ReplayStore::load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, "replay store " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::SchemaError, "replay store " + path.string() + " is not a JSON object");
  }
  ReplayStore store;
  for (const auto& [fp, response] : doc.items()) {
    if (!response.is_string()) {
      throw Error(ErrorCode::SchemaError, "replay store entry " + fp + " is not a string");
    }
    store.responses_[fp] = response.get<std::string>();
  }
  return store;
}

ReplayStore::ReplayStore(ReplayStore&& other) noexcept {
  std::lock_guard lock(other.mutex_);
  responses_ = std::move(other.responses_);
}

void ReplayStore::save(const std::filesystem::path& path) const { write_file_atomic(path, serialize()); }

ReplayProvider::ReplayProvider(std::shared_ptr<ReplayStore> store, Mode mode,
                               std::shared_ptr<LlmProvider> fallback)
    : store_(std::move(store)), mode_(mode), fallback_(std::move(fallback)) {}

std::string ReplayProvider::complete(const RenderedPrompt& prompt) {
  const auto fp = fingerprint(prompt);
  if (auto hit = store_->lookup(fp)) return *hit;
  if (mode_ == Mode::Record && fallback_) {
    auto response = fallback_->complete(prompt);
    store_->record_fingerprint(fp, response, /*overwrite=*/true);
    return response;
  }
  throw ProviderError(ErrorCode::ReplayMiss,
                      "no recorded response for " + std::string(task_name(prompt.task)) +
                          " prompt (fingerprint " + fp + ")",
                      0, fp);
}

}  // namespace argplan
