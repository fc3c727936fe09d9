#include "support.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include <unistd.h>

#include "argplan/clock.hpp"
#include "argplan/draft.hpp"
#include "argplan/error.hpp"
#include "argplan/ideation.hpp"
#include "argplan/io.hpp"
#include "argplan/persistence.hpp"
#include "argplan/plan_graph.hpp"
#include "argplan/session.hpp"

namespace argplan::testing {

std::string ScriptedProvider::complete(const RenderedPrompt& prompt) {
  {
    std::lock_guard lock(mutex_);
    calls_.push_back(prompt);
  }
  return script_(prompt);
}

std::vector<RenderedPrompt> ScriptedProvider::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t ScriptedProvider::call_count() const {
  std::lock_guard lock(mutex_);
  return calls_.size();
}

std::size_t ScriptedProvider::count(PromptTask task) const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(std::count_if(
      calls_.begin(), calls_.end(), [task](const RenderedPrompt& p) { return p.task == task; }));
}

std::size_t ScriptedProvider::draft_calls() const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(std::count_if(
      calls_.begin(), calls_.end(), [](const RenderedPrompt& p) { return is_draft_task(p.task); }));
}

bool is_draft_task(PromptTask task) {
  return task == PromptTask::DraftKeyAspect || task == PromptTask::DraftDiscussionPoint ||
         task == PromptTask::DraftCounterargument || task == PromptTask::DraftSupportingEvidence;
}

std::shared_ptr<ScriptedProvider> echo_provider() {
  return std::make_shared<ScriptedProvider>([](const RenderedPrompt& p) -> std::string {
    const std::string& last = p.messages.back().content;
    switch (p.task) {
      case PromptTask::LogicalFallacies:
        return "1. Hasty Generalization: one case stands for all\n"
               "2. False Dilemma: only two options are offered\n";
      case PromptTask::SupportingEvidence:
        return "1. A survey of recent graduates (logos)\n"
               "2. A story from a former student (pathos)\n"
               "3. A professor's testimony (ethos)\n";
      case PromptTask::KeyAspects:
      case PromptTask::DiscussionPoints:
      case PromptTask::Counterarguments:
      case PromptTask::CascadeTopicSuggestions: {
        const std::string tag(task_name(p.task));
        const auto h = fingerprint(p).substr(0, 6);
        return "1. " + tag + " idea one " + h + "\n2. " + tag + " idea two " + h + "\n3. " + tag +
               " idea three " + h + "\n";
      }
      default:
        return "draft of " + last + " #" + std::to_string(p.messages.size());
    }
  });
}

std::shared_ptr<ScriptedProvider> failing_provider() {
  return std::make_shared<ScriptedProvider>([](const RenderedPrompt&) -> std::string {
    throw ProviderError(ErrorCode::ProviderHttpError, "scripted failure", 503);
  });
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("argplan-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

namespace {

const std::vector<std::string> kWords = {
    "tuition", "breadth", "careers", "history", "ethics",  "labs",   "debate",
    "writing", "science", "budget",  "faculty", "alumni", "\"quoted\"", "back\\slash",
    "café",    "naïve",   "日本語",   "emoji 🎓", "tab\there", "line\nbreak"};

std::string random_text(std::mt19937_64& rng, bool rich) {
  std::uniform_int_distribution<int> len(1, 6);
  std::uniform_int_distribution<std::size_t> pick(0, rich ? kWords.size() - 1 : 11);
  std::string out;
  for (int i = len(rng); i > 0; --i) {
    if (!out.empty()) out += ' ';
    out += kWords[pick(rng)];
  }
  return out;
}

Timestamp random_time(std::mt19937_64& rng) {
  std::uniform_int_distribution<long long> secs(0, 4'000'000'000LL);
  return Timestamp(std::chrono::seconds(secs(rng)));
}

template <typename T>
const T& pick_one(std::mt19937_64& rng, const std::vector<T>& items) {
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

EdgeKind random_edge(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 3);
  return kAllEdgeKinds[d(rng)];
}

bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

std::vector<NodeId> non_root_ids(const ArgumentPlan& plan) {
  auto ids = oracle_preorder(plan);
  ids.erase(ids.begin());
  return ids;
}

std::string join(const std::vector<NodeId>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ",") + id;
  return out;
}

std::vector<NodeId> sorted(std::vector<NodeId> ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::map<NodeId, std::optional<bool>> stale_flags(const ArgumentPlan& plan) {
  std::map<NodeId, std::optional<bool>> out;
  for (const auto& id : oracle_preorder(plan)) {
    const auto& node = node_at(plan, id);
    out[id] = node.draft ? std::optional<bool>(node.draft->stale) : std::nullopt;
  }
  return out;
}

void give_fresh_draft(ArgumentPlan& plan, const NodeId& id) {
  auto& node = node_at(plan, id);
  node.draft = DraftBlock{"text of " + id, false, {}, {}};
}

}  // namespace

ArgumentPlan random_plan(std::mt19937_64& rng, std::size_t max_nodes, bool rich) {
  std::uniform_int_distribution<std::size_t> size(1, max_nodes);
  const std::size_t target = size(rng);
  ArgumentPlan plan = new_plan(random_text(rng, rich), rich && coin(rng) ? "" : "plan-random");
  while (node_count(plan) < target) {
    const auto ids = oracle_preorder(plan);
    add_child(plan, pick_one(rng, ids), random_edge(rng), random_text(rng, rich));
    if (rich && node_count(plan) > 2 && coin(rng, 0.1)) {
      remove_subtree(plan, pick_one(rng, non_root_ids(plan)));
    }
  }
  if (rich) {
    std::uniform_int_distribution<int> small(0, 3);
    for (const auto& id : non_root_ids(plan)) {
      if (!coin(rng, 0.7)) continue;
      auto& node = node_at(plan, id);
      DraftBlock draft;
      draft.text = random_text(rng, true);
      draft.stale = coin(rng);
      for (int i = small(rng); i > 0; --i) draft.history.push_back(random_text(rng, true));
      for (int i = small(rng); i > 0; --i) {
        draft.refine_chat.push_back({static_cast<ChatRole>(small(rng) % 3), random_text(rng, true),
                                     random_time(rng)});
      }
      node.draft = std::move(draft);
    }
    plan.lazy_mode = coin(rng);
    plan.created_at = random_time(rng);
    plan.modified_at = random_time(rng);
  }
  return plan;
}

std::vector<NodeId> oracle_preorder(const ArgumentPlan& plan) {
  // Explicit stack: push children in reverse so the first child pops first.
  std::vector<NodeId> out;
  std::vector<const PlanNode*> stack{&plan.root};
  while (!stack.empty()) {
    const PlanNode* node = stack.back();
    stack.pop_back();
    out.push_back(node->id);
    for (auto it = node->children.rbegin(); it != node->children.rend(); ++it) stack.push_back(&*it);
  }
  return out;
}

std::map<NodeId, NodeId> oracle_parents(const ArgumentPlan& plan) {
  std::map<NodeId, NodeId> parents{{plan.root.id, ""}};
  std::deque<const PlanNode*> queue{&plan.root};
  while (!queue.empty()) {
    const PlanNode* node = queue.front();
    queue.pop_front();
    for (const auto& child : node->children) {
      parents[child.id] = node->id;
      queue.push_back(&child);
    }
  }
  return parents;
}

std::vector<NodeId> oracle_closure(const ArgumentPlan& plan, const NodeId& id) {
  const auto parents = oracle_parents(plan);
  std::vector<NodeId> out;
  for (const auto& [node, _] : parents) {
    for (NodeId at = node; !at.empty(); at = parents.at(at)) {
      if (at == id) {
        out.push_back(node);
        break;
      }
    }
  }
  return out;  // std::map iteration is already sorted
}

std::vector<std::string> structural_property_violations(std::uint64_t seed, int sequences,
                                                        int steps, std::size_t max_nodes) {
  std::vector<std::string> violations;
  for (int seq = 0; seq < sequences; ++seq) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(seq));
    ArgumentPlan plan = new_plan("root claim", "plan-prop");
    std::uint64_t expected_counter = 1;
    auto fail = [&](int step, const std::string& what) {
      violations.push_back("sequence " + std::to_string(seq) + " step " + std::to_string(step) +
                           ": " + what);
    };

    for (int step = 0; step < steps; ++step) {
      const auto before = plan;
      const auto before_flags = stale_flags(plan);
      const auto count = node_count(plan);
      const auto others = non_root_ids(plan);
      std::uniform_int_distribution<int> op_dist(0, 7);
      int op = op_dist(rng);
      if (others.empty() && op != 0) op = coin(rng) ? 0 : 7;
      if (op == 0 && count >= max_nodes) op = 4;
      if (others.empty() && op == 4) op = 7;

      // Expected stale set of a node-scoped change, computed before the change.
      std::optional<std::vector<NodeId>> expected_stale;
      std::vector<NodeId> returned;
      try {
        switch (op) {
          case 0: {  // add
            const auto parent = pick_one(rng, oracle_preorder(plan));
            const auto edge = random_edge(rng);
            const auto old_children = node_at(plan, parent).children.size();
            const auto id = add_child(plan, parent, edge, "child text");
            if (id != "n" + std::to_string(expected_counter)) fail(step, "unexpected id " + id);
            const auto& p = node_at(plan, parent);
            if (p.children.size() != old_children + 1 || p.children.back().id != id) {
              fail(step, "new child is not appended last under " + parent);
            }
            if (node_at(plan, id).color_index != expected_counter) fail(step, "color not counter");
            ++expected_counter;
            if (coin(rng)) give_fresh_draft(plan, id);
            break;
          }
          case 1: {  // set_edge
            const auto id = pick_one(rng, others);
            const auto edge = random_edge(rng);
            expected_stale = oracle_closure(plan, id);
            returned = set_edge_kind(plan, id, edge);
            if (node_at(plan, id).kind != kind_for_edge(edge)) fail(step, "kind not updated");
            break;
          }
          case 2: {  // move (valid or into own subtree)
            const auto id = pick_one(rng, others);
            const auto target = pick_one(rng, oracle_preorder(plan));
            const auto closure = oracle_closure(plan, id);
            const bool cycle = std::binary_search(closure.begin(), closure.end(), target);
            try {
              returned = move_node(plan, id, target, random_edge(rng));
              if (cycle) fail(step, "move into own subtree accepted");
              expected_stale = closure;
              if (oracle_parents(plan).at(id) != target) fail(step, "moved node has wrong parent");
            } catch (const Error& e) {
              if (!cycle || e.code() != ErrorCode::CycleForbidden) fail(step, "unexpected move error");
              if (!(plan == before)) fail(step, "failed move changed the plan");
            }
            break;
          }
          case 3: {  // remove
            const auto id = pick_one(rng, others);
            const auto closure = oracle_closure(plan, id);
            const auto removed = remove_subtree(plan, id);
            if (removed != closure.size()) fail(step, "remove count mismatch");
            for (const auto& gone : closure) {
              if (find_node(plan, gone) != nullptr) fail(step, "removed node survives: " + gone);
            }
            if (node_count(plan) != count - closure.size()) fail(step, "node count after remove");
            break;
          }
          case 4: {  // edit
            const auto id = pick_one(rng, oracle_preorder(plan));
            expected_stale = oracle_closure(plan, id);
            returned = edit_prompt_text(plan, id, "edited " + std::to_string(step));
            break;
          }
          case 5: {  // reorder
            const auto id = pick_one(rng, others);
            const auto parent = oracle_parents(plan).at(id);
            auto old_order = node_at(plan, parent).children;
            std::uniform_int_distribution<std::size_t> to_dist(0, old_order.size() - 1);
            const auto to = to_dist(rng);
            std::size_t from = 0;
            while (old_order[from].id != id) ++from;
            reorder_child(plan, parent, from, to);
            std::vector<NodeId> expected;
            for (const auto& c : old_order) {
              if (c.id != id) expected.push_back(c.id);
            }
            expected.insert(expected.begin() + static_cast<std::ptrdiff_t>(to), id);
            std::vector<NodeId> got;
            for (const auto& c : node_at(plan, parent).children) got.push_back(c.id);
            if (got != expected) fail(step, "reorder produced " + join(got));
            break;
          }
          case 6: {  // forbidden operations on the root
            int which = std::uniform_int_distribution<int>(0, 2)(rng);
            try {
              if (which == 0) set_edge_kind(plan, plan.root.id, random_edge(rng));
              if (which == 1) remove_subtree(plan, plan.root.id);
              if (which == 2) move_node(plan, plan.root.id, plan.root.id, random_edge(rng));
              fail(step, "root operation accepted");
            } catch (const Error&) {
            }
            if (!(plan == before)) fail(step, "failed root operation changed the plan");
            break;
          }
          case 7: {  // draft something
            for (const auto& id : others) {
              if (coin(rng, 0.3)) give_fresh_draft(plan, id);
            }
            break;
          }
        }
      } catch (const Error& e) {
        fail(step, std::string("unexpected error: ") + e.what());
      }

      if (expected_stale) {
        if (sorted(returned) != *expected_stale) {
          fail(step, "stale set " + join(sorted(returned)) + " != closure " + join(*expected_stale));
        }
        // Returned order is document order.
        std::vector<NodeId> in_doc_order;
        for (const auto& id : oracle_preorder(plan)) {
          if (std::find(returned.begin(), returned.end(), id) != returned.end()) in_doc_order.push_back(id);
        }
        if (in_doc_order != returned) fail(step, "stale set not in document order");
        const auto after = stale_flags(plan);
        for (const auto& [id, flag] : after) {
          const bool inside = std::binary_search(expected_stale->begin(), expected_stale->end(), id);
          if (inside && flag && !*flag) fail(step, id + " should be stale");
          if (!inside && before_flags.count(id) && before_flags.at(id) != flag) {
            fail(step, id + " changed staleness outside the closure");
          }
        }
      }

      // Structural invariants after every step.
      for (const auto& v : validate_plan(plan)) fail(step, v);
      const auto order = oracle_preorder(plan);
      if (document_order(plan) != order) fail(step, "document_order differs from pre-order oracle");
      std::set<NodeId> unique(order.begin(), order.end());
      if (unique.size() != order.size()) fail(step, "duplicate ids");
      if (plan.next_color != expected_counter) fail(step, "creation counter drifted");
      if (plan.root.kind != NodeKind::MainArgument || plan.root.edge_from_parent) {
        fail(step, "root lost its role");
      }
      for (const auto& id : order) {
        const auto& node = node_at(plan, id);
        if (id != plan.root.id &&
            (!node.edge_from_parent || node.kind != kind_for_edge(*node.edge_from_parent))) {
          fail(step, "kind/edge mismatch at " + id);
        }
        if (id != "n" + std::to_string(node.color_index)) fail(step, "id/color mismatch at " + id);
      }
      if (violations.size() > 50) return violations;
    }
  }
  return violations;
}

std::vector<std::string> lazy_contract_violations() {
  std::vector<std::string> violations;
  auto provider = echo_provider();
  PlanSession session(new_plan(kAliceArgument, "plan-lazy"), provider);
  auto& plan = session.plan();

  // Lazy ON: a mutation log that would otherwise need drafts.
  session.set_lazy(true);
  session.mutate([](ArgumentPlan& p) { return add_child(p, "n0", EdgeKind::FeaturedBy, "aspect a"); });
  session.mutate([](ArgumentPlan& p) { return add_child(p, "n0", EdgeKind::FeaturedBy, "aspect b"); });
  session.mutate([](ArgumentPlan& p) { return add_child(p, "n1", EdgeKind::ElaboratedBy, "point"); });
  session.mutate([](ArgumentPlan& p) {
    return accept_suggestions(p, "n3", EdgeKind::AttackedBy, {"counter x", "counter y"});
  });
  session.mutate([](ArgumentPlan& p) { return edit_prompt_text(p, "n1", "aspect a, revised"); });
  session.mutate([](ArgumentPlan& p) { return set_edge_kind(p, "n5", EdgeKind::SupportedBy); });
  session.mutate([](ArgumentPlan& p) { return move_node(p, "n4", "n2", EdgeKind::AttackedBy); });
  session.mutate([](ArgumentPlan& p) { reorder_child(p, "n0", 1, 0); });
  session.mutate([](ArgumentPlan& p) { return remove_subtree(p, "n5"); });
  if (provider->draft_calls() != 0) {
    violations.push_back("lazy ON issued " + std::to_string(provider->draft_calls()) + " draft calls");
  }
  const auto pending = nodes_needing_generation(plan);
  if (pending.size() != node_count(plan) - 1) violations.push_back("lazy ON left drafts in place");

  // Switching OFF drafts exactly what was pending, in document order.
  const auto generated = session.set_lazy(false);
  if (generated != pending) violations.push_back("lazy OFF generated " + join(generated));
  if (provider->draft_calls() != pending.size()) violations.push_back("lazy OFF call count");

  // Lazy OFF: after every mutation nothing is left stale, and exactly the
  // mutation's stale set was redrafted.
  auto check = [&](const std::string& label, const std::vector<NodeId>& expect) {
    if (!nodes_needing_generation(plan).empty()) violations.push_back(label + ": stale nodes remain");
    if (session.last_generated() != expect) {
      violations.push_back(label + ": generated " + join(session.last_generated()) + " expected " +
                           join(expect));
    }
  };
  const auto n6 = session.mutate([](ArgumentPlan& p) { return add_child(p, "n3", EdgeKind::SupportedBy, "ev"); });
  check("add", {n6});
  auto stale = session.mutate([](ArgumentPlan& p) { return edit_prompt_text(p, "n1", "aspect a again"); });
  check("edit", stale);
  stale = session.mutate([](ArgumentPlan& p) { return set_edge_kind(p, "n3", EdgeKind::AttackedBy); });
  check("set_edge", stale);
  stale = session.mutate([](ArgumentPlan& p) { return move_node(p, "n3", "n2", EdgeKind::ElaboratedBy); });
  check("move", stale);
  session.mutate([](ArgumentPlan& p) { reorder_child(p, "n0", 0, 1); });
  check("reorder", {});
  session.mutate([](ArgumentPlan& p) { return remove_subtree(p, "n6"); });
  check("remove", {});
  const auto ids = session.mutate([](ArgumentPlan& p) {
    return accept_suggestions(p, "n0", EdgeKind::FeaturedBy, {"aspect c", "aspect d"});
  });
  check("accept", ids);
  return violations;
}

std::vector<std::string> persistence_roundtrip_failures(std::uint64_t seed, int count) {
  std::vector<std::string> failures;
  std::mt19937_64 rng(seed);
  TempDir dir;
  for (int i = 0; i < count; ++i) {
    const auto plan = random_plan(rng, 20, /*rich=*/true);
    const auto path = dir / ("p" + std::to_string(i) + ".plan.json");
    try {
      save_plan(plan, path);
      const auto loaded = load_plan(path);
      if (!(loaded == plan)) failures.push_back("plan " + std::to_string(i) + " differs after reload");
      const auto bytes = read_file(path);
      save_plan(loaded, path);
      if (read_file(path) != bytes) failures.push_back("plan " + std::to_string(i) + " bytes unstable");
      if (serialize_plan(plan) != bytes) failures.push_back("plan " + std::to_string(i) + " save != serialize");
    } catch (const Error& e) {
      failures.push_back("plan " + std::to_string(i) + ": " + e.what());
    }
  }
  return failures;
}

}  // namespace argplan::testing
