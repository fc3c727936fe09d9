#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argplan/chat.hpp"

namespace argplan {

enum class PromptTask {
  KeyAspects,
  DiscussionPoints,
  Counterarguments,
  LogicalFallacies,
  SupportingEvidence,
  DraftKeyAspect,
  DraftDiscussionPoint,
  DraftCounterargument,
  DraftSupportingEvidence,
  FixFallacies,
  Alternatives,
  RefineWithInstruction,
  CascadeTopicSuggestions,
};

inline constexpr PromptTask kAllPromptTasks[] = {
    PromptTask::KeyAspects,           PromptTask::DiscussionPoints,
    PromptTask::Counterarguments,     PromptTask::LogicalFallacies,
    PromptTask::SupportingEvidence,   PromptTask::DraftKeyAspect,
    PromptTask::DraftDiscussionPoint, PromptTask::DraftCounterargument,
    PromptTask::DraftSupportingEvidence, PromptTask::FixFallacies,
    PromptTask::Alternatives,         PromptTask::RefineWithInstruction,
    PromptTask::CascadeTopicSuggestions,
};

std::string_view task_name(PromptTask task);
std::optional<PromptTask> parse_task(std::string_view name);

enum class Slot {
  SelectedArgument,
  SelectedAspect,
  SelectedPoint,
  CounterArgument,
  EvidenceType,
  FallacyList,
  Instruction,
  ParentContext,
  DraftPrompt,
  CurrentDraft,
};

std::string_view slot_name(Slot slot);
std::optional<Slot> parse_slot(std::string_view name);

class SlotMap {
 public:
  SlotMap() = default;

  SlotMap& set(Slot slot, std::string value) {
    values_[slot] = std::move(value);
    return *this;
  }
  const std::string* get(Slot slot) const {
    auto it = values_.find(slot);
    return it == values_.end() ? nullptr : &it->second;
  }

 private:
  std::map<Slot, std::string> values_;
};

/// Sampling temperatures per task family.
struct PromptSettings {
  double ideation_temperature = 0.7;
  double draft_temperature = 0.7;
  double alternatives_temperature = 1.0;
};

struct RenderedPrompt {
  PromptTask task = PromptTask::KeyAspects;
  std::vector<ChatMessage> messages;
  double temperature = 0.7;

  bool operator==(const RenderedPrompt&) const = default;
};

/// Parsed template data file: a header line naming the task, its temperature
/// family and few-shot count, followed by role sections.
struct PromptTemplate {
  PromptTask task = PromptTask::KeyAspects;
  std::string temperature_family;  // ideation | draft | alternatives
  std::size_t fewshot_pairs = 0;
  std::vector<ChatMessage> sections;  // content may hold {{slot}} placeholders
};

/// Parses template text. Throws Error(SchemaError) on malformed input.
PromptTemplate parse_template(std::string_view text);

/// Template compiled into the library for tasks that have their own data
/// file. CascadeTopicSuggestions has none; it reuses the ideation templates.
const PromptTemplate& builtin_template(PromptTask task);

/// Slots referenced by the task's template, in first-use order.
std::vector<Slot> required_slots(PromptTask task);

/// Renders `task` with `slots`. Throws Error(MissingSlot) when a referenced
/// slot is absent or blank. For CascadeTopicSuggestions pass `reuse` to name
/// the ideation template whose text is reused.
RenderedPrompt render(PromptTask task, const SlotMap& slots, const PromptSettings& settings = {});
RenderedPrompt render_cascade_topics(PromptTask reuse, const SlotMap& slots,
                                     const PromptSettings& settings = {});

}  // namespace argplan
