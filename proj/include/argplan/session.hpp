#pragma once

#include <memory>
#include <type_traits>
#include <utility>
#include <vector>

#include "argplan/draft.hpp"
#include "argplan/plan.hpp"
#include "argplan/provider.hpp"

namespace argplan {

/// A plan bound to a provider. Structural mutations go through mutate(), which
/// runs the eager-update hook afterwards, so with lazy mode off nothing is
/// left stale once a mutation returns.
class PlanSession {
 public:
  PlanSession(ArgumentPlan plan, std::shared_ptr<LlmProvider> provider,
              PromptSettings settings = {})
      : plan_(std::move(plan)), provider_(std::move(provider)), settings_(settings) {}

  const ArgumentPlan& plan() const { return plan_; }
  ArgumentPlan& plan() { return plan_; }
  LlmProvider& provider() { return *provider_; }
  const PromptSettings& settings() const { return settings_; }

  /// Runs `mutation(plan)` then the eager hook; returns what the mutation returned.
  template <typename Mutation>
  decltype(auto) mutate(Mutation&& mutation) {
    last_generated_.clear();
    if constexpr (std::is_void_v<std::invoke_result_t<Mutation, ArgumentPlan&>>) {
      std::forward<Mutation>(mutation)(plan_);
      last_generated_ = run_eager_hook(plan_, *provider_, settings_);
    } else {
      decltype(auto) result = std::forward<Mutation>(mutation)(plan_);
      last_generated_ = run_eager_hook(plan_, *provider_, settings_);
      return result;
    }
  }

  std::vector<NodeId> set_lazy(bool on) {
    last_generated_ = set_lazy_mode(plan_, on, *provider_, settings_);
    return last_generated_;
  }

  std::vector<NodeId> generate() {
    last_generated_ = generate_all_stale(plan_, *provider_, settings_);
    return last_generated_;
  }

  /// Ids drafted by the most recent hook or generate call.
  const std::vector<NodeId>& last_generated() const { return last_generated_; }

 private:
  ArgumentPlan plan_;
  std::shared_ptr<LlmProvider> provider_;
  PromptSettings settings_;
  std::vector<NodeId> last_generated_;
};

}  // namespace argplan
