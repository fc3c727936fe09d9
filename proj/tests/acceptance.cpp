// Acceptance suite: one PASS/FAIL/SKIP line per criterion, exit 1 on any FAIL.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "argplan/draft.hpp"
#include "argplan/http_provider.hpp"
#include "argplan/ideation.hpp"
#include "argplan/persistence.hpp"
#include "argplan/plan_graph.hpp"
#include "support.hpp"

using namespace argplan;
using namespace argplan::testing;

namespace {

struct Outcome {
  enum { Pass, Fail, Skip } status = Pass;
  std::string detail;
};

Outcome from_failures(const std::vector<std::string>& failures, std::string pass_detail) {
  if (failures.empty()) return {Outcome::Pass, std::move(pass_detail)};
  std::ostringstream out;
  out << failures.size() << " failure(s); first: " << failures.front();
  return {Outcome::Fail, out.str()};
}

Outcome golden_suite() {
  std::vector<std::string> failures;
  int matched = 0;
  for (auto task : golden_tasks()) {
    if (auto diff = golden_mismatch(task)) {
      failures.push_back(std::string(task_name(task)) + ": " + *diff);
    } else {
      ++matched;
    }
  }
  return from_failures(failures, std::to_string(matched) + "/10 templates byte-exact");
}

Outcome scenario_replay() {
  auto store = alice_replay_store();
  std::vector<std::string> failures;
  std::string first_file;
  for (int run = 0; run < 2; ++run) {
    ReplayProvider provider(store);
    AliceOutcome out;
    try {
      out = run_alice_scenario(provider);
    } catch (const std::exception& e) {
      return {Outcome::Fail, std::string("scenario threw: ") + e.what()};
    }
    const auto& plan = out.plan;
    const auto order = document_order(plan);
    std::vector<NodeKind> kinds;
    for (const auto& id : order) kinds.push_back(node_at(plan, id).kind);
    const std::vector<NodeKind> expected = {NodeKind::MainArgument,    NodeKind::KeyAspect,
                                            NodeKind::DiscussionPoint, NodeKind::Counterargument,
                                            NodeKind::KeyAspect,       NodeKind::DiscussionPoint};
    if (kinds != expected) failures.push_back("document order kinds differ");
    if (order.size() == 6) {
      if (node_at(plan, order[1]).prompt_text != "well-rounded education") failures.push_back("first aspect");
      if (node_at(plan, order[4]).prompt_text != "career preparation") failures.push_back("second aspect");
      if (node_at(plan, order[2]).prompt_text.find("lifelong") == std::string::npos) failures.push_back("first point");
      if (node_at(plan, order[5]).prompt_text.find("adaptability") == std::string::npos) failures.push_back("second point");
    }
    for (const auto& id : order) {
      const auto& node = node_at(plan, id);
      if (id != plan.root.id && (!node.draft || node.draft->stale || node.draft->text.empty())) {
        failures.push_back("missing draft on " + id);
      }
    }
    const auto file = serialize_plan(plan);
    if (run == 0) {
      first_file = file;
    } else if (file != first_file) {
      failures.push_back("plan file differs between runs");
    }
  }
  return from_failures(failures, "6 nodes in expected order, drafts present, byte-identical across runs");
}

Outcome structural_suite() {
  constexpr int kSequences = 1000;
  return from_failures(structural_property_violations(20240501, kSequences, 40, 20),
                       std::to_string(kSequences) + " sequences, 0 violations");
}

Outcome edge_kind_suite() {
  // Expected kind per edge, written out independently of kind_for_edge.
  const std::pair<EdgeKind, NodeKind> table[] = {
      {EdgeKind::FeaturedBy, NodeKind::KeyAspect},
      {EdgeKind::ElaboratedBy, NodeKind::DiscussionPoint},
      {EdgeKind::AttackedBy, NodeKind::Counterargument},
      {EdgeKind::SupportedBy, NodeKind::SupportingEvidence},
  };
  std::vector<std::string> failures;
  int ok = 0;
  for (const auto& [from, from_kind] : table) {
    if (kind_for_edge(from) != from_kind) failures.push_back(std::string(edge_kind_name(from)) + " maps wrong");
    for (const auto& [to, to_kind] : table) {
      auto plan = new_plan("claim");
      const auto id = add_child(plan, plan.root.id, from, "node");
      const auto child = add_child(plan, id, EdgeKind::ElaboratedBy, "below");
      replace_draft(plan, id, "d");
      replace_draft(plan, child, "d");
      const auto stale = set_edge_kind(plan, id, to);
      const auto& node = node_at(plan, id);
      // The closure rule holds even when the edge is unchanged.
      const std::vector<NodeId> expected_stale = {id, child};
      if (node.kind == to_kind && node.edge_from_parent == to && stale == expected_stale &&
          node.draft->stale && node_at(plan, child).draft->stale &&
          validate_plan(plan).empty()) {
        ++ok;
      } else {
        failures.push_back(std::string(edge_kind_name(from)) + " -> " + std::string(edge_kind_name(to)));
      }
    }
  }
  return from_failures(failures, std::to_string(ok) + "/16 transitions");
}

Outcome lazy_contract() { return from_failures(lazy_contract_violations(), "0 draft calls lazy, no stale eager"); }

Outcome persistence_suite() {
  return from_failures(persistence_roundtrip_failures(7, 200), "200 plans round-trip, bytes stable");
}

Outcome service_suite() {
  auto failures = service_conformance_failures();
  auto concurrent = concurrent_patch_violations(8, 40);
  failures.insert(failures.end(), concurrent.begin(), concurrent.end());
  return from_failures(failures, "all endpoints conform, 320 concurrent PATCHes linearizable");
}

Outcome live_smoke() {
  if (!std::getenv("LLM_API_KEY")) return {Outcome::Skip, "LLM_API_KEY not set"};
  try {
    HttpProvider provider(ProviderConfig::from_env());
    const auto plan = new_plan("Governments should not fund any scientific research whose consequences are unclear");
    const auto aspects = elaborate_key_aspects(plan, plan.root.id, provider);
    if (aspects.items.size() < 3) {
      return {Outcome::Fail, "only " + std::to_string(aspects.items.size()) + " aspects parsed"};
    }
    return {Outcome::Pass, std::to_string(aspects.items.size()) + " aspects parsed"};
  } catch (const std::exception& e) {
    return {Outcome::Fail, e.what()};
  }
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"template-goldens", golden_suite},
      {"scenario-replay", scenario_replay},
      {"structural-properties", structural_suite},
      {"edge-kind-exhaustive", edge_kind_suite},
      {"lazy-mode-contract", lazy_contract},
      {"persistence-roundtrip", persistence_suite},
      {"service-conformance", service_suite},
      {"live-smoke", live_smoke},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {Outcome::Fail, std::string("uncaught: ") + e.what()};
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start).count();
    const char* label = outcome.status == Outcome::Pass ? "PASS" : outcome.status == Outcome::Skip ? "SKIP" : "FAIL";
    if (outcome.status == Outcome::Fail) ++failed;
    std::cout << label << "  " << name << " (" << ms << " ms): " << outcome.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
