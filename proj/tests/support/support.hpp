#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "argplan/plan.hpp"
#include "argplan/prompt.hpp"
#include "argplan/provider.hpp"
#include "argplan/service.hpp"

namespace argplan::testing {

/// Provider driven by a callback, recording every prompt it sees.
class ScriptedProvider : public LlmProvider {
 public:
  using Script = std::function<std::string(const RenderedPrompt&)>;

  explicit ScriptedProvider(Script script) : script_(std::move(script)) {}

  std::string complete(const RenderedPrompt& prompt) override;

  std::vector<RenderedPrompt> calls() const;
  std::size_t call_count() const;
  std::size_t count(PromptTask task) const;
  std::size_t draft_calls() const;

 private:
  Script script_;
  mutable std::mutex mutex_;
  std::vector<RenderedPrompt> calls_;
};

/// A provider answering drafts with "draft of <last user message>" and lists
/// with three numbered items.
std::shared_ptr<ScriptedProvider> echo_provider();

/// Always fails with ProviderHttpError.
std::shared_ptr<ScriptedProvider> failing_provider();

bool is_draft_task(PromptTask task);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Random plan of at most `max_nodes` nodes. With `rich`, nodes get drafts,
/// histories, refine transcripts, stale flags and awkward text.
ArgumentPlan random_plan(std::mt19937_64& rng, std::size_t max_nodes, bool rich);

// Independent oracles over the nested node representation.
std::vector<NodeId> oracle_preorder(const ArgumentPlan& plan);
/// Parent id per node (root maps to "").
std::map<NodeId, NodeId> oracle_parents(const ArgumentPlan& plan);
/// `id` and everything whose ancestor chain reaches `id`, as a sorted list.
std::vector<NodeId> oracle_closure(const ArgumentPlan& plan, const NodeId& id);

/// Applies `sequences` random mutation sequences (up to `steps` each) to
/// plans bounded at `max_nodes`, checking tree shape, kind/edge agreement,
/// ordering, id uniqueness and stale sets after every step. Returns violations.
std::vector<std::string> structural_property_violations(std::uint64_t seed, int sequences,
                                                        int steps, std::size_t max_nodes);

// The example session: a student plans an essay on breadth requirements.
inline constexpr char kAliceArgument[] =
    "Universities should require every student to take a variety of courses outside the "
    "student's field of study";

/// Replay store holding every completion the example session needs.
std::shared_ptr<ReplayStore> alice_replay_store();

struct AliceOutcome {
  ArgumentPlan plan;
  std::vector<std::string> offered_aspects;
  std::map<std::string, std::vector<std::string>> offered_points;
  std::vector<std::string> offered_counterarguments;
};

/// Runs the session against `provider` with a pinned clock and a fixed plan id.
AliceOutcome run_alice_scenario(LlmProvider& provider);

/// Directory of the transcribed template goldens.
std::filesystem::path golden_dir();

/// Empty when the rendered template for `task` matches its golden file.
std::optional<std::string> golden_mismatch(PromptTask task);

/// Golden-backed tasks (every task with a verbatim transcription).
std::vector<PromptTask> golden_tasks();

/// A Service bound to a free loopback port, served on a background thread.
class RunningService {
 public:
  RunningService(std::filesystem::path store_dir, std::shared_ptr<LlmProvider> provider,
                 std::chrono::seconds cascade_ttl = std::chrono::minutes(30));
  ~RunningService();

  int port() const { return port_; }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  Service service_;
  int port_ = 0;
  std::thread thread_;
};

struct Reply {
  int status = 0;  // 0 when the request itself failed
  nlohmann::json body;
  std::string raw;
  std::string content_type;
};

/// Minimal JSON client for the service.
class Api {
 public:
  explicit Api(int port);
  ~Api();

  Reply get(const std::string& path);
  Reply del(const std::string& path);
  Reply post(const std::string& path, const nlohmann::json& body = nlohmann::json::object());
  Reply patch(const std::string& path, const nlohmann::json& body);
  Reply options(const std::string& path);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocks every completion until release(); lets tests change a plan while
/// a request is waiting on the provider.
class GateProvider : public LlmProvider {
 public:
  explicit GateProvider(std::shared_ptr<LlmProvider> inner) : inner_(std::move(inner)) {}

  std::string complete(const RenderedPrompt& prompt) override;
  /// Waits until some request is blocked inside complete().
  void wait_for_caller();
  void release();

 private:
  std::shared_ptr<LlmProvider> inner_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool open_ = false;
  int waiting_ = 0;
};

/// Exercises every endpoint against a replay-backed server and returns the
/// mismatches in status codes or bodies.
std::vector<std::string> service_conformance_failures();

/// Concurrent conflicting PATCHes on one plan; returns invariant violations
/// or non-linearizable outcomes.
std::vector<std::string> concurrent_patch_violations(int threads, int rounds);

/// Scripted mutation log under lazy ON then OFF with a call-counting
/// provider; returns contract violations.
std::vector<std::string> lazy_contract_violations();

/// Round-trips `count` random plans through save/load; returns failures.
std::vector<std::string> persistence_roundtrip_failures(std::uint64_t seed, int count);

}  // namespace argplan::testing
