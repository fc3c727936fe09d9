#include "argplan/draft.hpp"

#include "argplan/error.hpp"
#include "argplan/plan_graph.hpp"

namespace argplan {
namespace {

const PlanNode& non_root(const ArgumentPlan& plan, std::string_view node_id,
                         const PlanNode** parent_out = nullptr) {
  const PlanNode& node = node_at(plan, node_id);
  const PlanNode* parent = parent_of(plan, node_id);
  if (parent == nullptr) {
    throw Error(ErrorCode::RootDraftForbidden,
                "the main argument has no generated draft; its block is its own text");
  }
  if (parent_out != nullptr) *parent_out = parent;
  return node;
}

// Goal text of the nearest KeyAspect ancestor, or the root's text.
std::string aspect_context(const ArgumentPlan& plan, std::string_view node_id) {
  for (const PlanNode* up = parent_of(plan, node_id); up != nullptr; up = parent_of(plan, up->id)) {
    if (up->kind == NodeKind::KeyAspect) return up->prompt_text;
  }
  return plan.root.prompt_text;
}

const DraftBlock& require_draft(const PlanNode& node) {
  if (!node.draft) throw Error(ErrorCode::NoDraft, "node " + node.id + " has no draft");
  return *node.draft;
}

void set_draft_text(PlanNode& node, std::string text, bool restart_chat) {
  if (!node.draft) {
    node.draft.emplace();
  } else {
    node.draft->history.push_back(std::move(node.draft->text));
  }
  node.draft->text = std::move(text);
  node.draft->stale = false;
  if (restart_chat) node.draft->refine_chat.clear();
}

CascadeStep& pending_step(CascadePlan& cascade, std::size_t step_index) {
  if (step_index >= cascade.steps.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "cascade has " + std::to_string(cascade.steps.size()) + " steps");
  }
  auto& step = cascade.steps[step_index];
  if (step.status != StepStatus::Pending) {
    throw Error(ErrorCode::StepNotPending, "cascade step " + std::to_string(step_index) + " is " +
                                               std::string(step_status_name(step.status)));
  }
  return step;
}

}  // namespace

RenderedPrompt draft_prompt(const ArgumentPlan& plan, std::string_view node_id,
                            const PromptSettings& settings) {
  const PlanNode* parent = nullptr;
  const PlanNode& node = non_root(plan, node_id, &parent);
  SlotMap slots;
  slots.set(Slot::ParentContext, parent->prompt_text);
  switch (node.kind) {
    case NodeKind::KeyAspect:
      slots.set(Slot::SelectedAspect, node.prompt_text);
      return render(PromptTask::DraftKeyAspect, slots, settings);
    case NodeKind::DiscussionPoint:
      slots.set(Slot::SelectedPoint, node.prompt_text);
      return render(PromptTask::DraftDiscussionPoint, slots, settings);
    case NodeKind::Counterargument:
      slots.set(Slot::CounterArgument, node.prompt_text);
      slots.set(Slot::SelectedAspect, aspect_context(plan, node_id));
      return render(PromptTask::DraftCounterargument, slots, settings);
    case NodeKind::SupportingEvidence:
      slots.set(Slot::EvidenceType, node.prompt_text);
      return render(PromptTask::DraftSupportingEvidence, slots, settings);
    case NodeKind::MainArgument:
      break;
  }
  throw Error(ErrorCode::RootDraftForbidden, "main_argument node below the root");
}

void store_generated_draft(ArgumentPlan& plan, std::string_view node_id, std::string text) {
  non_root(plan, node_id);
  set_draft_text(node_at(plan, node_id), std::move(text), /*restart_chat=*/true);
  plan.modified_at = now();
}

std::string generate_draft(ArgumentPlan& plan, std::string_view node_id, LlmProvider& provider,
                           const PromptSettings& settings) {
  auto text = provider.complete(draft_prompt(plan, node_id, settings));
  store_generated_draft(plan, node_id, text);
  return text;
}

std::vector<NodeId> generate_all_stale(ArgumentPlan& plan, LlmProvider& provider,
                                       const PromptSettings& settings) {
  std::vector<NodeId> processed;
  for (const auto& id : nodes_needing_generation(plan)) {
    try {
      generate_draft(plan, id, provider, settings);
    } catch (const ProviderError& e) {
      throw GenerationInterrupted(e, processed, id);
    }
    processed.push_back(id);
  }
  return processed;
}

std::vector<NodeId> set_lazy_mode(ArgumentPlan& plan, bool on, LlmProvider& provider,
                                  const PromptSettings& settings) {
  plan.lazy_mode = on;
  plan.modified_at = now();
  if (on) return {};
  return generate_all_stale(plan, provider, settings);
}

std::vector<NodeId> run_eager_hook(ArgumentPlan& plan, LlmProvider& provider,
                                   const PromptSettings& settings) {
  if (plan.lazy_mode) return {};
  return generate_all_stale(plan, provider, settings);
}

RenderedPrompt alternative_prompt(const ArgumentPlan& plan, std::string_view node_id,
                                  const std::vector<std::string>& previous,
                                  const PromptSettings& settings) {
  const auto& draft = require_draft(non_root(plan, node_id));
  const auto original = draft_prompt(plan, node_id, settings);
  auto prompt = render(PromptTask::Alternatives,
                       SlotMap()
                           .set(Slot::DraftPrompt, original.messages.back().content)
                           .set(Slot::CurrentDraft, draft.text),
                       settings);
  const ChatMessage request = prompt.messages.back();
  for (const auto& candidate : previous) {
    prompt.messages.push_back({ChatRole::Assistant, candidate});
    prompt.messages.push_back(request);
  }
  return prompt;
}

std::vector<std::string> alternatives(const ArgumentPlan& plan, std::string_view node_id, int n,
                                      LlmProvider& provider, const PromptSettings& settings) {
  if (n < 1 || n > kMaxAlternatives) {
    throw Error(ErrorCode::InvalidArgument,
                "alternative count must be between 1 and " + std::to_string(kMaxAlternatives));
  }
  std::vector<std::string> candidates;
  for (int i = 0; i < n; ++i) {
    candidates.push_back(provider.complete(alternative_prompt(plan, node_id, candidates, settings)));
  }
  return candidates;
}

void replace_draft(ArgumentPlan& plan, std::string_view node_id, std::string_view text) {
  non_root(plan, node_id);
  if (is_blank(text)) throw Error(ErrorCode::EmptyArgument, "draft text must not be blank");
  set_draft_text(node_at(plan, node_id), std::string(text), /*restart_chat=*/true);
  plan.modified_at = now();
}

RenderedPrompt refine_prompt(const ArgumentPlan& plan, std::string_view node_id,
                             std::string_view instruction, const PromptSettings& settings) {
  const auto& draft = require_draft(non_root(plan, node_id));
  if (is_blank(instruction)) throw Error(ErrorCode::InvalidArgument, "instruction must not be blank");
  auto prompt = render(PromptTask::RefineWithInstruction,
                       SlotMap()
                           .set(Slot::CurrentDraft, draft.text)
                           .set(Slot::Instruction, std::string(instruction)),
                       settings);
  if (!draft.refine_chat.empty()) {
    prompt.messages.clear();
    for (const auto& turn : draft.refine_chat) prompt.messages.push_back({turn.role, turn.content});
    prompt.messages.push_back({ChatRole::User, std::string(instruction)});
  }
  return prompt;
}

void store_refinement(ArgumentPlan& plan, std::string_view node_id, std::string_view instruction,
                      std::string reply, const PromptSettings& settings) {
  // Seed from the same render refine_prompt used, so the stored transcript
  // is exactly the conversation that was sent.
  const auto sent = refine_prompt(plan, node_id, instruction, settings);
  PlanNode& node = node_at(plan, node_id);
  auto& chat = node.draft->refine_chat;
  const auto stamp = now();
  if (chat.empty()) {
    for (std::size_t i = 0; i + 1 < sent.messages.size(); ++i) {
      chat.push_back({sent.messages[i].role, sent.messages[i].content, stamp});
    }
  }
  chat.push_back({ChatRole::User, std::string(instruction), stamp});
  chat.push_back({ChatRole::Assistant, reply, stamp});
  set_draft_text(node, std::move(reply), /*restart_chat=*/false);
  plan.modified_at = stamp;
}

std::string refine(ArgumentPlan& plan, std::string_view node_id, std::string_view instruction,
                   LlmProvider& provider, const PromptSettings& settings) {
  auto reply = provider.complete(refine_prompt(plan, node_id, instruction, settings));
  store_refinement(plan, node_id, instruction, reply, settings);
  return reply;
}

std::string format_fallacy_list(const std::vector<FallacySuggestion>& fallacies) {
  std::string out;
  for (const auto& f : fallacies) {
    if (!out.empty()) out += "; ";
    out += f.name + ": " + f.explanation;
  }
  return out;
}

RenderedPrompt fix_fallacies_prompt(const ArgumentPlan& plan, std::string_view node_id,
                                    const std::vector<FallacySuggestion>& fallacies,
                                    const PromptSettings& settings) {
  const auto& node = node_at(plan, node_id);
  if (fallacies.empty()) throw Error(ErrorCode::InvalidArgument, "no fallacies to address");
  for (const auto& f : fallacies) {
    if (is_blank(f.name) || is_blank(f.explanation)) {
      throw Error(ErrorCode::InvalidArgument, "fallacies need a name and an explanation");
    }
  }
  const std::string& argument = node.draft ? node.draft->text : node.prompt_text;
  return render(PromptTask::FixFallacies,
                SlotMap()
                    .set(Slot::SelectedArgument, argument)
                    .set(Slot::FallacyList, format_fallacy_list(fallacies)),
                settings);
}

std::string fix_fallacies(const ArgumentPlan& plan, std::string_view node_id,
                          const std::vector<FallacySuggestion>& fallacies, LlmProvider& provider,
                          const PromptSettings& settings) {
  return provider.complete(fix_fallacies_prompt(plan, node_id, fallacies, settings));
}

std::string_view step_status_name(StepStatus status) {
  switch (status) {
    case StepStatus::Pending: return "pending";
    case StepStatus::Applied: return "applied";
    case StepStatus::Skipped: return "skipped";
  }
  return "pending";
}

PromptTask cascade_topic_source(const ArgumentPlan& plan, std::string_view node_id) {
  const PlanNode& node = node_at(plan, node_id);
  const PlanNode* parent = parent_of(plan, node_id);
  switch (node.kind) {
    case NodeKind::Counterargument: return PromptTask::Counterarguments;
    case NodeKind::SupportingEvidence: return PromptTask::SupportingEvidence;
    case NodeKind::DiscussionPoint:
      if (parent != nullptr && parent_of(plan, parent->id) != nullptr) {
        return PromptTask::DiscussionPoints;
      }
      return PromptTask::KeyAspects;
    case NodeKind::KeyAspect:
    case NodeKind::MainArgument:
      return PromptTask::KeyAspects;
  }
  return PromptTask::KeyAspects;
}

RenderedPrompt cascade_topic_prompt(const ArgumentPlan& plan, std::string_view node_id,
                                    const PromptSettings& settings) {
  const PlanNode* parent = nullptr;
  non_root(plan, node_id, &parent);
  const PromptTask reuse = cascade_topic_source(plan, node_id);
  SlotMap slots;
  if (reuse == PromptTask::DiscussionPoints) {
    slots.set(Slot::SelectedArgument, parent_of(plan, parent->id)->prompt_text);
    slots.set(Slot::SelectedAspect, parent->prompt_text);
  } else {
    slots.set(Slot::SelectedArgument, parent->prompt_text);
  }
  return render_cascade_topics(reuse, slots, settings);
}

std::vector<std::string> parse_cascade_topics(PromptTask reused, std::string_view raw) {
  if (reused == PromptTask::SupportingEvidence) {
    auto parsed = parse_evidence(raw);
    std::vector<std::string> out;
    for (const auto& e : parsed.items) out.push_back(evidence_prompt_text(e));
    return out;
  }
  return parse_numbered_list(raw).items;
}

CascadePlan begin_cascade(ArgumentPlan& plan, std::string_view node_id, std::string_view new_text) {
  edit_prompt_text(plan, node_id, new_text);
  CascadePlan cascade;
  cascade.changed_node = NodeId(node_id);
  for (auto& id : dependents(plan, node_id)) cascade.steps.push_back({std::move(id), {}, {}, {}});
  return cascade;
}

CascadePlan cascade_update(ArgumentPlan& plan, std::string_view node_id, std::string_view new_text,
                           LlmProvider& provider, const PromptSettings& settings) {
  auto cascade = begin_cascade(plan, node_id, new_text);
  if (parent_of(plan, node_id) != nullptr) {
    try {
      generate_draft(plan, node_id, provider, settings);
    } catch (const ProviderError& e) {
      cascade.regeneration_error = e.what();
    }
  }
  for (auto& step : cascade.steps) {
    const PromptTask reuse = cascade_topic_source(plan, step.node_id);
    const auto prompt = cascade_topic_prompt(plan, step.node_id, settings);
    try {
      step.suggested_topics = parse_cascade_topics(reuse, provider.complete(prompt));
      if (step.suggested_topics.empty()) step.topic_error = "no topics in the reply";
    } catch (const ProviderError& e) {
      step.topic_error = e.what();
    }
  }
  return cascade;
}

std::optional<RenderedPrompt> prepare_cascade_step(ArgumentPlan& plan, CascadePlan& cascade,
                                                   std::size_t step_index,
                                                   const CascadeChoice& choice,
                                                   const PromptSettings& settings) {
  auto& step = pending_step(cascade, step_index);
  node_at(plan, step.node_id);
  switch (choice.kind) {
    case CascadeChoice::Kind::Skip:
      step.status = StepStatus::Skipped;
      return std::nullopt;
    case CascadeChoice::Kind::Topic:
      edit_prompt_text(plan, step.node_id, choice.topic);
      break;
    case CascadeChoice::Kind::Keep:
      break;
  }
  return draft_prompt(plan, step.node_id, settings);
}

void finish_cascade_step(ArgumentPlan& plan, CascadePlan& cascade, std::size_t step_index,
                         std::string draft_text) {
  auto& step = pending_step(cascade, step_index);
  store_generated_draft(plan, step.node_id, std::move(draft_text));
  step.status = StepStatus::Applied;
}

void cascade_step(ArgumentPlan& plan, CascadePlan& cascade, std::size_t step_index,
                  const CascadeChoice& choice, LlmProvider& provider,
                  const PromptSettings& settings) {
  auto prompt = prepare_cascade_step(plan, cascade, step_index, choice, settings);
  if (!prompt) return;
  finish_cascade_step(plan, cascade, step_index, provider.complete(*prompt));
}

}  // namespace argplan
