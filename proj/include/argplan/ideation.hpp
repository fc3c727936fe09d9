#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "argplan/error.hpp"
#include "argplan/parse.hpp"
#include "argplan/plan.hpp"
#include "argplan/prompt.hpp"
#include "argplan/provider.hpp"

namespace argplan {

/// Proposals awaiting acceptance. Never stored in the plan.
struct SuggestionList {
  PromptTask task = PromptTask::KeyAspects;
  NodeId source_node;
  std::vector<std::string> items;
};

struct AspectFailure {
  std::string aspect;
  ErrorCode code = ErrorCode::ProviderHttpError;
  std::string message;
};

/// Per-aspect outcome of discussion_points, in the order aspects were given.
struct DiscussionPointsResult {
  std::vector<std::pair<std::string, SuggestionList>> by_aspect;
  std::vector<AspectFailure> failures;

  const SuggestionList* find(std::string_view aspect) const;
};

// Prompt builders; they read the plan and never call a provider.
RenderedPrompt key_aspects_prompt(const ArgumentPlan& plan, std::string_view node_id,
                                  const PromptSettings& settings = {});
RenderedPrompt discussion_points_prompt(const ArgumentPlan& plan, std::string_view node_id,
                                        std::string_view aspect,
                                        const PromptSettings& settings = {});
RenderedPrompt spark_prompt(PromptTask task, const ArgumentPlan& plan, std::string_view node_id,
                            const PromptSettings& settings = {});

/// Completes `prompt` and parses the reply, retrying once with the identical
/// prompt on a parse failure. Throws Error(ParseFailure) after the retry.
template <typename Parser>
auto complete_and_parse(LlmProvider& provider, const RenderedPrompt& prompt, Parser parse)
    -> decltype(parse(std::string_view{}).items) {
  auto first = parse(provider.complete(prompt));
  if (first.ok()) return std::move(first.items);
  auto second = parse(provider.complete(prompt));
  if (second.ok()) return std::move(second.items);
  throw Error(ErrorCode::ParseFailure, "unparseable " + std::string(task_name(prompt.task)) +
                                           " response: " + *second.failure);
}

SuggestionList elaborate_key_aspects(const ArgumentPlan& plan, std::string_view node_id,
                                     LlmProvider& provider, const PromptSettings& settings = {});

/// One completion per aspect, issued concurrently. Failed aspects are listed
/// in `failures`; the call throws only when every aspect failed.
DiscussionPointsResult discussion_points(const ArgumentPlan& plan, std::string_view node_id,
                                         const std::vector<std::string>& aspects,
                                         LlmProvider& provider,
                                         const PromptSettings& settings = {});

SuggestionList counterargument_sparks(const ArgumentPlan& plan, std::string_view node_id,
                                      LlmProvider& provider, const PromptSettings& settings = {});
std::vector<FallacySuggestion> fallacy_sparks(const ArgumentPlan& plan, std::string_view node_id,
                                              LlmProvider& provider,
                                              const PromptSettings& settings = {});
std::vector<EvidenceSuggestion> evidence_sparks(const ArgumentPlan& plan, std::string_view node_id,
                                                LlmProvider& provider,
                                                const PromptSettings& settings = {});

/// Appends one child per item under `node_id`, in item order.
std::vector<NodeId> accept_suggestions(ArgumentPlan& plan, std::string_view node_id, EdgeKind edge,
                                       const std::vector<std::string>& items);

/// Accepts evidence as SupportedBy children whose text is "strategy: description".
std::vector<NodeId> accept_evidence(ArgumentPlan& plan, std::string_view node_id,
                                    const std::vector<EvidenceSuggestion>& items);

}  // namespace argplan
