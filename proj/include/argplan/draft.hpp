#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argplan/parse.hpp"
#include "argplan/plan.hpp"
#include "argplan/prompt.hpp"
#include "argplan/provider.hpp"

namespace argplan {

// Every provider-backed operation below is also offered as a pair of
// prompt-builder (const plan) and apply step, so callers can run the
// completion without holding the plan.

/// Draft prompt chosen by node kind; the parent's goal text is the context.
/// Throws RootDraftForbidden for the root.
RenderedPrompt draft_prompt(const ArgumentPlan& plan, std::string_view node_id,
                            const PromptSettings& settings = {});

/// Stores generated text: the previous text (if any) goes to history, the
/// block is marked fresh and its refine conversation restarts.
void store_generated_draft(ArgumentPlan& plan, std::string_view node_id, std::string text);

std::string generate_draft(ArgumentPlan& plan, std::string_view node_id, LlmProvider& provider,
                           const PromptSettings& settings = {});

/// Generates every node needing generation in document order. On a provider
/// failure throws GenerationInterrupted carrying the ids already done.
std::vector<NodeId> generate_all_stale(ArgumentPlan& plan, LlmProvider& provider,
                                       const PromptSettings& settings = {});

/// Stores the flag. Switching lazy mode off immediately generates everything
/// that is stale and returns those ids.
std::vector<NodeId> set_lazy_mode(ArgumentPlan& plan, bool on, LlmProvider& provider,
                                  const PromptSettings& settings = {});

/// Post-mutation hook: a no-op in lazy mode, generate_all_stale otherwise.
std::vector<NodeId> run_eager_hook(ArgumentPlan& plan, LlmProvider& provider,
                                   const PromptSettings& settings = {});

/// Prompt for one more candidate after `previous` ones.
RenderedPrompt alternative_prompt(const ArgumentPlan& plan, std::string_view node_id,
                                  const std::vector<std::string>& previous,
                                  const PromptSettings& settings = {});

inline constexpr int kMaxAlternatives = 10;

/// `n` candidate texts for a drafted node; the plan is not modified.
std::vector<std::string> alternatives(const ArgumentPlan& plan, std::string_view node_id, int n,
                                      LlmProvider& provider, const PromptSettings& settings = {});

/// Direct edit or accepting an alternative. Bootstraps a block on an undrafted
/// node. Descendants are not staled: drafts never feed other drafts.
void replace_draft(ArgumentPlan& plan, std::string_view node_id, std::string_view text);

RenderedPrompt refine_prompt(const ArgumentPlan& plan, std::string_view node_id,
                             std::string_view instruction, const PromptSettings& settings = {});
void store_refinement(ArgumentPlan& plan, std::string_view node_id, std::string_view instruction,
                      std::string reply, const PromptSettings& settings = {});
std::string refine(ArgumentPlan& plan, std::string_view node_id, std::string_view instruction,
                   LlmProvider& provider, const PromptSettings& settings = {});

/// "Name: explanation" entries joined with "; ".
std::string format_fallacy_list(const std::vector<FallacySuggestion>& fallacies);
RenderedPrompt fix_fallacies_prompt(const ArgumentPlan& plan, std::string_view node_id,
                                    const std::vector<FallacySuggestion>& fallacies,
                                    const PromptSettings& settings = {});
/// Revised text for the node's draft (or goal text when undrafted). The
/// caller applies it with replace_draft.
std::string fix_fallacies(const ArgumentPlan& plan, std::string_view node_id,
                          const std::vector<FallacySuggestion>& fallacies, LlmProvider& provider,
                          const PromptSettings& settings = {});

enum class StepStatus { Pending, Applied, Skipped };

std::string_view step_status_name(StepStatus status);

struct CascadeStep {
  NodeId node_id;
  std::vector<std::string> suggested_topics;
  StepStatus status = StepStatus::Pending;
  /// Why suggested_topics is empty, when the suggestion call failed.
  std::optional<std::string> topic_error;
};

struct CascadePlan {
  NodeId changed_node;
  std::vector<CascadeStep> steps;
  /// Set when regenerating the changed node itself failed; it stays stale.
  std::optional<std::string> regeneration_error;
};

struct CascadeChoice {
  enum class Kind { Topic, Keep, Skip };
  Kind kind = Kind::Keep;
  std::string topic;

  static CascadeChoice with_topic(std::string text) { return {Kind::Topic, std::move(text)}; }
  static CascadeChoice keep() { return {Kind::Keep, {}}; }
  static CascadeChoice skip() { return {Kind::Skip, {}}; }
};

/// Topic suggestions for a dependent, keyed on its parent's current goal text.
RenderedPrompt cascade_topic_prompt(const ArgumentPlan& plan, std::string_view node_id,
                                    const PromptSettings& settings = {});
std::vector<std::string> parse_cascade_topics(PromptTask reused, std::string_view raw);
/// Template family the topic prompt for `node_id` reuses.
PromptTask cascade_topic_source(const ArgumentPlan& plan, std::string_view node_id);

/// Applies the edit and lays out one pending step per dependent, without
/// provider calls.
CascadePlan begin_cascade(ArgumentPlan& plan, std::string_view node_id, std::string_view new_text);

/// Edit, regenerate the changed node, then suggest topics for each dependent.
/// Suggestion failures leave that step's topics empty.
CascadePlan cascade_update(ArgumentPlan& plan, std::string_view node_id, std::string_view new_text,
                           LlmProvider& provider, const PromptSettings& settings = {});

/// First half of a step: validates it, applies a chosen topic, and returns the
/// draft prompt to complete; a skip resolves the step and returns nullopt.
std::optional<RenderedPrompt> prepare_cascade_step(ArgumentPlan& plan, CascadePlan& cascade,
                                                   std::size_t step_index,
                                                   const CascadeChoice& choice,
                                                   const PromptSettings& settings = {});
void finish_cascade_step(ArgumentPlan& plan, CascadePlan& cascade, std::size_t step_index,
                         std::string draft_text);

void cascade_step(ArgumentPlan& plan, CascadePlan& cascade, std::size_t step_index,
                  const CascadeChoice& choice, LlmProvider& provider,
                  const PromptSettings& settings = {});

}  // namespace argplan
