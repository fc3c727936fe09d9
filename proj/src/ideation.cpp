#include "argplan/ideation.hpp"

#include <exception>
#include <future>

#include "argplan/plan_graph.hpp"

namespace argplan {

const SuggestionList* DiscussionPointsResult::find(std::string_view aspect) const {
  for (const auto& [name, list] : by_aspect) {
    if (name == aspect) return &list;
  }
  return nullptr;
}

RenderedPrompt key_aspects_prompt(const ArgumentPlan& plan, std::string_view node_id,
                                  const PromptSettings& settings) {
  const auto& node = node_at(plan, node_id);
  return render(PromptTask::KeyAspects, SlotMap().set(Slot::SelectedArgument, node.prompt_text),
                settings);
}

RenderedPrompt discussion_points_prompt(const ArgumentPlan& plan, std::string_view node_id,
                                        std::string_view aspect, const PromptSettings& settings) {
  const auto& node = node_at(plan, node_id);
  return render(PromptTask::DiscussionPoints,
                SlotMap()
                    .set(Slot::SelectedArgument, node.prompt_text)
                    .set(Slot::SelectedAspect, std::string(aspect)),
                settings);
}

RenderedPrompt spark_prompt(PromptTask task, const ArgumentPlan& plan, std::string_view node_id,
                            const PromptSettings& settings) {
  if (task != PromptTask::Counterarguments && task != PromptTask::LogicalFallacies &&
      task != PromptTask::SupportingEvidence) {
    throw Error(ErrorCode::InvalidArgument, std::string(task_name(task)) + " is not a spark task");
  }
  const auto& node = node_at(plan, node_id);
  return render(task, SlotMap().set(Slot::SelectedArgument, node.prompt_text), settings);
}

SuggestionList elaborate_key_aspects(const ArgumentPlan& plan, std::string_view node_id,
                                     LlmProvider& provider, const PromptSettings& settings) {
  auto prompt = key_aspects_prompt(plan, node_id, settings);
  return {PromptTask::KeyAspects, NodeId(node_id),
          complete_and_parse(provider, prompt, parse_numbered_list)};
}

DiscussionPointsResult discussion_points(const ArgumentPlan& plan, std::string_view node_id,
                                         const std::vector<std::string>& aspects,
                                         LlmProvider& provider, const PromptSettings& settings) {
  if (aspects.empty()) throw Error(ErrorCode::InvalidArgument, "no aspects selected");
  std::vector<RenderedPrompt> prompts;
  prompts.reserve(aspects.size());
  for (const auto& aspect : aspects) {
    prompts.push_back(discussion_points_prompt(plan, node_id, aspect, settings));
  }

  std::vector<std::future<std::vector<std::string>>> pending;
  pending.reserve(prompts.size());
  for (const auto& prompt : prompts) {
    pending.push_back(std::async(std::launch::async, [&provider, &prompt] {
      return complete_and_parse(provider, prompt, parse_numbered_list);
    }));
  }

  DiscussionPointsResult result;
  std::exception_ptr first_error;
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    try {
      result.by_aspect.emplace_back(
          aspects[i], SuggestionList{PromptTask::DiscussionPoints, NodeId(node_id), pending[i].get()});
    } catch (const Error& e) {
      if (!first_error) first_error = std::current_exception();
      result.failures.push_back({aspects[i], e.code(), e.what()});
    }
  }
  if (result.by_aspect.empty()) std::rethrow_exception(first_error);
  return result;
}

SuggestionList counterargument_sparks(const ArgumentPlan& plan, std::string_view node_id,
                                      LlmProvider& provider, const PromptSettings& settings) {
  auto prompt = spark_prompt(PromptTask::Counterarguments, plan, node_id, settings);
  return {PromptTask::Counterarguments, NodeId(node_id),
          complete_and_parse(provider, prompt, parse_numbered_list)};
}

std::vector<FallacySuggestion> fallacy_sparks(const ArgumentPlan& plan, std::string_view node_id,
                                              LlmProvider& provider,
                                              const PromptSettings& settings) {
  auto prompt = spark_prompt(PromptTask::LogicalFallacies, plan, node_id, settings);
  return complete_and_parse(provider, prompt, parse_fallacies);
}

std::vector<EvidenceSuggestion> evidence_sparks(const ArgumentPlan& plan, std::string_view node_id,
                                                LlmProvider& provider,
                                                const PromptSettings& settings) {
  auto prompt = spark_prompt(PromptTask::SupportingEvidence, plan, node_id, settings);
  return complete_and_parse(provider, prompt, parse_evidence);
}

std::vector<NodeId> accept_suggestions(ArgumentPlan& plan, std::string_view node_id, EdgeKind edge,
                                       const std::vector<std::string>& items) {
  if (items.empty()) throw Error(ErrorCode::InvalidArgument, "no suggestions to accept");
  node_at(plan, node_id);
  for (const auto& item : items) {
    if (is_blank(item)) throw Error(ErrorCode::EmptyArgument, "suggestion text must not be blank");
  }
  std::vector<NodeId> created;
  created.reserve(items.size());
  for (const auto& item : items) created.push_back(add_child(plan, node_id, edge, item));
  return created;
}

std::vector<NodeId> accept_evidence(ArgumentPlan& plan, std::string_view node_id,
                                    const std::vector<EvidenceSuggestion>& items) {
  std::vector<std::string> texts;
  texts.reserve(items.size());
  for (const auto& e : items) texts.push_back(evidence_prompt_text(e));
  return accept_suggestions(plan, node_id, EdgeKind::SupportedBy, texts);
}

}  // namespace argplan
