#include "argplan/service.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <shared_mutex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "argplan/draft.hpp"
#include "argplan/error.hpp"
#include "argplan/ideation.hpp"
#include "argplan/persistence.hpp"
#include "argplan/plan_graph.hpp"

namespace argplan {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::string_view kPlanSuffix = ".plan.json";

int http_status(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Validation: return 400;
    case ErrorCategory::NotFound: return 404;
    case ErrorCategory::Conflict: return 409;
    case ErrorCategory::Provider: return 502;
    case ErrorCategory::Storage: return 500;
  }
  return 500;
}

json error_body(const Error& e) {
  return {{"code", category_name(e.category())},
          {"error", error_code_name(e.code())},
          {"message", e.what()}};
}

/// The eager hook failed after the triggering mutation was already persisted.
struct EagerFailure {
  GenerationInterrupted cause;
};

std::string random_id(std::string_view prefix) {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id(prefix);
  const auto bits = rng();
  for (int i = 0; i < 12; ++i) id += kHex[(bits >> (i * 4)) & 0xf];
  return id;
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
  }
  return body;
}

template <typename T>
T field(const json& body, const char* key) {
  if (!body.contains(key)) {
    throw Error(ErrorCode::InvalidArgument, std::string("missing field \"") + key + "\"");
  }
  try {
    return body.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("field \"") + key + "\" has the wrong type");
  }
}

EdgeKind edge_field(const json& body, const char* key = "edge") {
  const auto name = field<std::string>(body, key);
  auto edge = parse_edge_kind(name);
  if (!edge) throw Error(ErrorCode::InvalidArgument, "unknown edge kind \"" + name + "\"");
  return *edge;
}

std::size_t index_param(const std::string& text) {
  std::size_t value = 0;
  for (char c : text) {
    if (c < '0' || c > '9' || value > 1'000'000) {
      throw Error(ErrorCode::InvalidArgument, "step index must be a non-negative integer");
    }
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  return value;
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

struct PlanEntry {
  std::shared_mutex mutex;
  ArgumentPlan plan;
  bool removed = false;
};

class PlanStore {
 public:
  explicit PlanStore(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create store " + dir_.string() + ": " + ec.message());
    for (const auto& file : fs::directory_iterator(dir_, ec)) {
      const auto name = file.path().filename().string();
      if (name.size() <= kPlanSuffix.size() ||
          name.compare(name.size() - kPlanSuffix.size(), kPlanSuffix.size(), kPlanSuffix) != 0) {
        continue;
      }
      auto entry = std::make_shared<PlanEntry>();
      entry->plan = load_plan(file.path());
      if (entry->plan.id + std::string(kPlanSuffix) != name) {
        throw Error(ErrorCode::SchemaError, name + " holds plan " + entry->plan.id);
      }
      index_.emplace(entry->plan.id, std::move(entry));
    }
    if (ec) throw Error(ErrorCode::IoError, "cannot list store " + dir_.string() + ": " + ec.message());
  }

  void add(ArgumentPlan plan) {
    save_plan(plan, path_for(plan.id));
    auto entry = std::make_shared<PlanEntry>();
    const auto id = plan.id;
    entry->plan = std::move(plan);
    std::lock_guard lock(index_mutex_);
    index_.emplace(id, std::move(entry));
  }

  void remove(const std::string& id) {
    auto entry = get(id);
    std::unique_lock lock(entry->mutex);
    if (entry->removed) throw unknown(id);
    std::error_code ec;
    fs::remove(path_for(id), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot delete plan file: " + ec.message());
    entry->removed = true;
    std::lock_guard index_lock(index_mutex_);
    index_.erase(id);
  }

  std::vector<std::shared_ptr<PlanEntry>> all() {
    std::lock_guard lock(index_mutex_);
    std::vector<std::shared_ptr<PlanEntry>> out;
    for (const auto& [_, entry] : index_) out.push_back(entry);
    return out;
  }

  template <typename F>
  auto read(const std::string& id, F&& f) {
    auto entry = get(id);
    std::shared_lock lock(entry->mutex);
    if (entry->removed) throw unknown(id);
    return f(std::as_const(entry->plan));
  }

  ArgumentPlan snapshot(const std::string& id) {
    return read(id, [](const ArgumentPlan& plan) { return plan; });
  }

  /// Applies `f` to a copy, persists it, then publishes it. A throwing `f`
  /// or a failed write leaves the plan untouched.
  template <typename F>
  auto write(const std::string& id, F&& f) {
    return write_if(id, [&f](ArgumentPlan& plan) { return std::make_pair(true, f(plan)); });
  }

  /// Like write, but `f` returns {changed, result} and unchanged plans are not saved.
  template <typename F>
  auto write_if(const std::string& id, F&& f) {
    auto entry = get(id);
    std::unique_lock lock(entry->mutex);
    if (entry->removed) throw unknown(id);
    ArgumentPlan copy = entry->plan;
    auto [changed, result] = f(copy);
    if (changed) {
      save_plan(copy, path_for(id));
      entry->plan = std::move(copy);
    }
    return result;
  }

 private:
  static Error unknown(const std::string& id) {
    return Error(ErrorCode::UnknownPlan, "unknown plan: " + id);
  }

  std::shared_ptr<PlanEntry> get(const std::string& id) {
    std::lock_guard lock(index_mutex_);
    auto it = index_.find(id);
    if (it == index_.end()) throw unknown(id);
    return it->second;
  }

  fs::path path_for(const std::string& id) const { return dir_ / (id + std::string(kPlanSuffix)); }

  fs::path dir_;
  std::mutex index_mutex_;
  std::map<std::string, std::shared_ptr<PlanEntry>> index_;
};

struct CascadeSession {
  std::mutex mutex;
  std::string id;
  std::string plan_id;
  CascadePlan cascade;
  Clock::time_point last_used;
};

json cascade_json(const CascadeSession& session) {
  json steps = json::array();
  for (std::size_t i = 0; i < session.cascade.steps.size(); ++i) {
    const auto& step = session.cascade.steps[i];
    steps.push_back({{"index", i},
                     {"node_id", step.node_id},
                     {"suggested_topics", step.suggested_topics},
                     {"status", step_status_name(step.status)},
                     {"topic_error", step.topic_error ? json(*step.topic_error) : json(nullptr)}});
  }
  const auto& regen = session.cascade.regeneration_error;
  return {{"cascade_id", session.id},
          {"plan_id", session.plan_id},
          {"changed_node", session.cascade.changed_node},
          {"regeneration_error", regen ? json(*regen) : json(nullptr)},
          {"steps", std::move(steps)}};
}

json evidence_json(const EvidenceSuggestion& e) {
  return {{"strategy", strategy_name(e.strategy)},
          {"description", e.description},
          {"text", evidence_prompt_text(e)}};
}

}  // namespace

struct Service::Impl {
  explicit Impl(ServiceConfig cfg) : config(std::move(cfg)), store(config.store_dir) {
    if (!config.provider) throw Error(ErrorCode::InvalidArgument, "service needs a provider");
    routes();
  }

  ServiceConfig config;
  PlanStore store;
  httplib::Server server;
  std::mutex cascades_mutex;
  std::map<std::string, std::shared_ptr<CascadeSession>> cascades;

  LlmProvider& provider() { return *config.provider; }
  const PromptSettings& settings() const { return config.settings; }

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const EagerFailure& failure) {
        auto body = error_body(failure.cause);
        body["mutation_applied"] = true;
        body["generated"] = failure.cause.processed();
        body["failed_node"] = failure.cause.failed_node();
        send_json(res, body, 502);
      } catch (const GenerationInterrupted& e) {
        auto body = error_body(e);
        body["generated"] = e.processed();
        body["failed_node"] = e.failed_node();
        send_json(res, body, 502);
      } catch (const Error& e) {
        send_json(res, error_body(e), http_status(e.category()));
      } catch (const std::exception& e) {
        send_json(res, {{"code", "internal"}, {"error", "internal"}, {"message", e.what()}}, 500);
      }
    };
  }

  // Drafts every node needing generation, one completion at a time, without
  // holding the plan lock during the call. A result is stored only if the
  // node still needs it and its prompt is unchanged; each node is tried once.
  std::vector<NodeId> generate_unlocked(const std::string& plan_id, bool eager) {
    struct Job {
      NodeId id;
      RenderedPrompt prompt;
    };
    std::vector<NodeId> done;
    std::set<NodeId> attempted;
    for (;;) {
      auto job = store.read(plan_id, [&](const ArgumentPlan& plan) -> std::optional<Job> {
        if (eager && plan.lazy_mode) return std::nullopt;
        for (const auto& id : nodes_needing_generation(plan)) {
          if (!attempted.count(id)) return Job{id, draft_prompt(plan, id, settings())};
        }
        return std::nullopt;
      });
      if (!job) return done;
      attempted.insert(job->id);
      std::string text;
      try {
        text = provider().complete(job->prompt);
      } catch (const ProviderError& e) {
        throw GenerationInterrupted(e, done, job->id);
      }
      const bool stored = store.write_if(plan_id, [&](ArgumentPlan& plan) {
        const PlanNode* node = find_node(plan, job->id);
        const bool current = node != nullptr && needs_generation(plan, *node) &&
                             draft_prompt(plan, job->id, settings()) == job->prompt;
        if (current) store_generated_draft(plan, job->id, text);
        return std::make_pair(current, current);
      });
      if (stored) done.push_back(job->id);
    }
  }

  std::vector<NodeId> eager_hook(const std::string& plan_id) {
    try {
      return generate_unlocked(plan_id, /*eager=*/true);
    } catch (const GenerationInterrupted& e) {
      throw EagerFailure{e};
    }
  }

  // Completes a prompt built from a snapshot, then applies the reply only if
  // rebuilding the prompt from the current plan gives the same prompt.
  template <typename Build, typename Apply>
  std::string complete_then_apply(const std::string& plan_id, const std::string& node_id,
                                  Build build, Apply apply) {
    const auto prompt = store.read(plan_id, build);
    auto reply = provider().complete(prompt);
    store.write(plan_id, [&](ArgumentPlan& plan) {
      if (find_node(plan, node_id) == nullptr) {
        throw Error(ErrorCode::Conflict, "node " + node_id + " was removed during the request");
      }
      if (build(std::as_const(plan)) != prompt) {
        throw Error(ErrorCode::Conflict, "node " + node_id + " changed during the request");
      }
      apply(plan, reply);
      return true;
    });
    return reply;
  }

  json node_json(const std::string& plan_id, const std::string& node_id) {
    return store.read(plan_id, [&](const ArgumentPlan& plan) {
      return node_to_json(node_at(plan, node_id));
    });
  }

  std::shared_ptr<CascadeSession> cascade_session(const std::string& id) {
    std::lock_guard lock(cascades_mutex);
    expire_cascades();
    auto it = cascades.find(id);
    if (it == cascades.end()) throw Error(ErrorCode::UnknownCascade, "unknown cascade: " + id);
    return it->second;
  }

  // Caller holds cascades_mutex. A session in use is never expired.
  void expire_cascades() {
    const auto cutoff = Clock::now() - config.cascade_ttl;
    for (auto it = cascades.begin(); it != cascades.end();) {
      std::unique_lock session_lock(it->second->mutex, std::try_to_lock);
      if (session_lock.owns_lock() && it->second->last_used < cutoff) {
        session_lock.unlock();
        it = cascades.erase(it);
      } else {
        ++it;
      }
    }
  }

  void routes();
  void plan_routes();
  void node_routes();
  void ideation_routes();
  void draft_routes();
  void cascade_routes();
};

void Service::Impl::routes() {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, PATCH, DELETE, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  plan_routes();
  node_routes();
  ideation_routes();
  draft_routes();
  cascade_routes();
}

void Service::Impl::plan_routes() {
  server.Post("/plans", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    auto plan = new_plan(field<std::string>(body, "argument"), random_id("plan-"));
    auto doc = plan_to_json(plan);
    store.add(std::move(plan));
    send_json(res, doc, 201);
  }));

  server.Get("/plans", guarded([this](const httplib::Request&, httplib::Response& res) {
    json plans = json::array();
    for (const auto& entry : store.all()) {
      std::shared_lock lock(entry->mutex);
      if (entry->removed) continue;
      const auto& plan = entry->plan;
      plans.push_back({{"id", plan.id},
                       {"argument", plan.root.prompt_text},
                       {"lazy_mode", plan.lazy_mode},
                       {"node_count", node_count(plan)},
                       {"created_at", format_timestamp(plan.created_at)},
                       {"modified_at", format_timestamp(plan.modified_at)}});
    }
    send_json(res, {{"plans", std::move(plans)}});
  }));

  server.Get(R"(/plans/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, store.read(req.matches[1], [](const ArgumentPlan& p) { return plan_to_json(p); }));
  }));

  server.Delete(R"(/plans/([^/]+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  store.remove(req.matches[1]);
                  res.status = 204;
                }));

  server.Patch(R"(/plans/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string plan_id = req.matches[1];
    const auto body = parse_body(req);
    const bool lazy = field<bool>(body, "lazy_mode");
    store.write(plan_id, [&](ArgumentPlan& plan) {
      plan.lazy_mode = lazy;
      plan.modified_at = now();
      return true;
    });
    auto generated = lazy ? std::vector<NodeId>{} : eager_hook(plan_id);
    send_json(res, {{"plan", store.read(plan_id, [](const ArgumentPlan& p) { return plan_to_json(p); })},
                    {"generated", generated}});
  }));

  server.Post(R"(/plans/([^/]+)/generate)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                send_json(res, {{"node_ids", generate_unlocked(req.matches[1], /*eager=*/false)}});
              }));

  server.Get(R"(/plans/([^/]+)/export)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const auto format = req.get_param_value("format");
               if (format != "markdown" && format != "text") {
                 throw Error(ErrorCode::InvalidArgument, "format must be markdown or text");
               }
               auto text = store.read(req.matches[1], [&](const ArgumentPlan& plan) {
                 return format == "markdown" ? export_markdown(plan) : export_text(plan);
               });
               res.set_content(text, format == "markdown" ? "text/markdown; charset=utf-8"
                                                          : "text/plain; charset=utf-8");
             }));
}

void Service::Impl::node_routes() {
  server.Post(R"(/plans/([^/]+)/nodes)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string plan_id = req.matches[1];
                const auto body = parse_body(req);
                const auto parent = field<std::string>(body, "parent_id");
                const auto edge = edge_field(body);
                const auto text = field<std::string>(body, "text");
                const auto id = store.write(
                    plan_id, [&](ArgumentPlan& plan) { return add_child(plan, parent, edge, text); });
                eager_hook(plan_id);
                send_json(res, node_json(plan_id, id), 201);
              }));

  server.Patch(R"(/plans/([^/]+)/nodes/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string plan_id = req.matches[1];
                 const std::string node_id = req.matches[2];
                 const auto body = parse_body(req);
                 int given = 0;
                 for (const char* key : {"text", "edge", "move", "reorder"}) given += body.contains(key);
                 if (given != 1) {
                   throw Error(ErrorCode::InvalidArgument,
                               "give exactly one of text, edge, move or reorder");
                 }
                 auto stale = store.write(plan_id, [&](ArgumentPlan& plan) -> std::vector<NodeId> {
                   if (body.contains("text")) {
                     return edit_prompt_text(plan, node_id, field<std::string>(body, "text"));
                   }
                   if (body.contains("edge")) return set_edge_kind(plan, node_id, edge_field(body));
                   if (body.contains("move")) {
                     const auto& move = body["move"];
                     return move_node(plan, node_id, field<std::string>(move, "parent_id"),
                                      edge_field(move));
                   }
                   const auto& reorder = body["reorder"];
                   const PlanNode* parent = parent_of(plan, node_id);
                   if (parent == nullptr) {
                     throw Error(ErrorCode::RootEdgeForbidden, "the root has no siblings");
                   }
                   reorder_child(plan, NodeId(parent->id), child_index(plan, node_id),
                                 field<std::size_t>(reorder, "to_index"));
                   return {};
                 });
                 auto generated = eager_hook(plan_id);
                 send_json(res, {{"node", node_json(plan_id, node_id)},
                                 {"stale", stale},
                                 {"generated", generated}});
               }));

  server.Delete(R"(/plans/([^/]+)/nodes/([^/]+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const std::string node_id = req.matches[2];
                  auto removed = store.write(req.matches[1], [&](ArgumentPlan& plan) {
                    return remove_subtree(plan, node_id);
                  });
                  send_json(res, {{"removed", removed}});
                }));

  server.Post(R"(/plans/([^/]+)/nodes/([^/]+)/accept)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string plan_id = req.matches[1];
                const std::string node_id = req.matches[2];
                const auto body = parse_body(req);
                const auto edge = edge_field(body);
                const auto items = field<std::vector<std::string>>(body, "items");
                auto ids = store.write(plan_id, [&](ArgumentPlan& plan) {
                  return accept_suggestions(plan, node_id, edge, items);
                });
                auto generated = eager_hook(plan_id);
                send_json(res, {{"node_ids", ids}, {"generated", generated}}, 201);
              }));
}

void Service::Impl::ideation_routes() {
  server.Post(R"(/plans/([^/]+)/nodes/([^/]+)/elaborate)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto plan = store.snapshot(req.matches[1]);
                auto list = elaborate_key_aspects(plan, req.matches[2].str(), provider(), settings());
                send_json(res, {{"aspects", list.items}});
              }));

  server.Post(R"(/plans/([^/]+)/nodes/([^/]+)/discussion-points)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                const auto aspects = field<std::vector<std::string>>(body, "aspects");
                const auto plan = store.snapshot(req.matches[1]);
                auto result =
                    discussion_points(plan, req.matches[2].str(), aspects, provider(), settings());
                json points = json::object();
                for (const auto& [aspect, list] : result.by_aspect) points[aspect] = list.items;
                json failures = json::array();
                for (const auto& f : result.failures) {
                  failures.push_back({{"aspect", f.aspect},
                                      {"code", category_name(category_of(f.code))},
                                      {"error", error_code_name(f.code)},
                                      {"message", f.message}});
                }
                send_json(res, {{"points", std::move(points)}, {"failures", std::move(failures)}});
              }));

  server.Post(R"(/plans/([^/]+)/nodes/([^/]+)/sparks/(counterarguments|fallacies|evidence))",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto plan = store.snapshot(req.matches[1]);
                const std::string node_id = req.matches[2];
                const std::string kind = req.matches[3];
                json items = json::array();
                if (kind == "counterarguments") {
                  items = counterargument_sparks(plan, node_id, provider(), settings()).items;
                } else if (kind == "fallacies") {
                  for (const auto& f : fallacy_sparks(plan, node_id, provider(), settings())) {
                    items.push_back({{"name", f.name}, {"explanation", f.explanation}});
                  }
                } else {
                  for (const auto& e : evidence_sparks(plan, node_id, provider(), settings())) {
                    items.push_back(evidence_json(e));
                  }
                }
                send_json(res, {{"kind", kind}, {"items", std::move(items)}});
              }));
}

void Service::Impl::draft_routes() {
  server.Post(R"(/plans/([^/]+)/nodes/([^/]+)/draft)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string node_id = req.matches[2];
                auto text = complete_then_apply(
                    req.matches[1], node_id,
                    [&](const ArgumentPlan& plan) { return draft_prompt(plan, node_id, settings()); },
                    [&](ArgumentPlan& plan, const std::string& reply) {
                      store_generated_draft(plan, node_id, reply);
                    });
                send_json(res, {{"text", text}});
              }));

  server.Post(R"(/plans/([^/]+)/nodes/([^/]+)/alternatives)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                const int n = field<int>(body, "n");
                const auto plan = store.snapshot(req.matches[1]);
                send_json(res, {{"candidates", alternatives(plan, req.matches[2].str(), n, provider(),
                                                            settings())}});
              }));

  server.Post(R"(/plans/([^/]+)/nodes/([^/]+)/replace)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string plan_id = req.matches[1];
                const std::string node_id = req.matches[2];
                const auto text = field<std::string>(parse_body(req), "text");
                store.write(plan_id, [&](ArgumentPlan& plan) {
                  replace_draft(plan, node_id, text);
                  return true;
                });
                send_json(res, {{"node", node_json(plan_id, node_id)}});
              }));

  server.Post(R"(/plans/([^/]+)/nodes/([^/]+)/refine)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string node_id = req.matches[2];
                const auto instruction = field<std::string>(parse_body(req), "instruction");
                auto text = complete_then_apply(
                    req.matches[1], node_id,
                    [&](const ArgumentPlan& plan) {
                      return refine_prompt(plan, node_id, instruction, settings());
                    },
                    [&](ArgumentPlan& plan, const std::string& reply) {
                      store_refinement(plan, node_id, instruction, reply, settings());
                    });
                send_json(res, {{"text", text}});
              }));

  server.Post(R"(/plans/([^/]+)/nodes/([^/]+)/fix-fallacies)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                if (!body.contains("fallacies") || !body["fallacies"].is_array()) {
                  throw Error(ErrorCode::InvalidArgument, "missing array field \"fallacies\"");
                }
                std::vector<FallacySuggestion> fallacies;
                for (const auto& f : body["fallacies"]) {
                  if (!f.is_object()) throw Error(ErrorCode::InvalidArgument, "fallacies must be objects");
                  fallacies.push_back(
                      {field<std::string>(f, "name"), field<std::string>(f, "explanation")});
                }
                const auto plan = store.snapshot(req.matches[1]);
                send_json(res, {{"text", fix_fallacies(plan, req.matches[2].str(), fallacies,
                                                       provider(), settings())}});
              }));
}

void Service::Impl::cascade_routes() {
  server.Post(R"(/plans/([^/]+)/nodes/([^/]+)/cascade)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string plan_id = req.matches[1];
                const std::string node_id = req.matches[2];
                const auto text = field<std::string>(parse_body(req), "text");

                auto session = std::make_shared<CascadeSession>();
                session->id = random_id("cascade-");
                session->plan_id = plan_id;
                session->cascade = store.write(
                    plan_id, [&](ArgumentPlan& plan) { return begin_cascade(plan, node_id, text); });

                const bool is_root = store.read(plan_id, [&](const ArgumentPlan& plan) {
                  return parent_of(plan, node_id) == nullptr;
                });
                if (!is_root) {
                  try {
                    complete_then_apply(
                        plan_id, node_id,
                        [&](const ArgumentPlan& plan) { return draft_prompt(plan, node_id, settings()); },
                        [&](ArgumentPlan& plan, const std::string& reply) {
                          store_generated_draft(plan, node_id, reply);
                        });
                  } catch (const Error& e) {
                    if (e.category() != ErrorCategory::Provider && e.code() != ErrorCode::Conflict) throw;
                    session->cascade.regeneration_error = e.what();
                  }
                }

                for (auto& step : session->cascade.steps) {
                  try {
                    auto [reuse, prompt] = store.read(plan_id, [&](const ArgumentPlan& plan) {
                      return std::make_pair(cascade_topic_source(plan, step.node_id),
                                            cascade_topic_prompt(plan, step.node_id, settings()));
                    });
                    step.suggested_topics = parse_cascade_topics(reuse, provider().complete(prompt));
                    if (step.suggested_topics.empty()) step.topic_error = "no topics in the reply";
                  } catch (const Error& e) {
                    if (e.category() != ErrorCategory::Provider && e.code() != ErrorCode::UnknownNode) {
                      throw;
                    }
                    step.topic_error = e.what();
                  }
                }

                session->last_used = Clock::now();
                auto body = cascade_json(*session);
                std::lock_guard lock(cascades_mutex);
                expire_cascades();
                cascades.emplace(session->id, std::move(session));
                send_json(res, body, 201);
              }));

  server.Get(R"(/cascades/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto session = cascade_session(req.matches[1]);
    std::lock_guard lock(session->mutex);
    session->last_used = Clock::now();
    send_json(res, cascade_json(*session));
  }));

  server.Post(R"(/cascades/([^/]+)/steps/([^/]+))",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                const auto index = index_param(req.matches[2]);
                int given = 0;
                for (const char* key : {"topic", "keep", "skip"}) given += body.contains(key);
                if (given != 1) throw Error(ErrorCode::InvalidArgument, "give exactly one of topic, keep or skip");
                CascadeChoice choice = body.contains("topic")
                                           ? CascadeChoice::with_topic(field<std::string>(body, "topic"))
                                       : body.contains("keep") ? CascadeChoice::keep()
                                                               : CascadeChoice::skip();

                auto session = cascade_session(req.matches[1]);
                std::lock_guard lock(session->mutex);
                session->last_used = Clock::now();

                CascadePlan updated = session->cascade;
                auto prompt = store.write(session->plan_id, [&](ArgumentPlan& plan) {
                  return prepare_cascade_step(plan, updated, index, choice, settings());
                });
                session->cascade = updated;
                if (prompt) {
                  const NodeId node_id = session->cascade.steps[index].node_id;
                  auto reply = provider().complete(*prompt);
                  store.write(session->plan_id, [&](ArgumentPlan& plan) {
                    if (find_node(plan, node_id) == nullptr ||
                        draft_prompt(plan, node_id, settings()) != *prompt) {
                      throw Error(ErrorCode::Conflict, "node " + node_id + " changed during the step");
                    }
                    finish_cascade_step(plan, session->cascade, index, reply);
                    return true;
                  });
                }
                session->last_used = Clock::now();
                send_json(res, cascade_json(*session));
              }));
}

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace argplan
