#include "argplan/prompt.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "argplan/error.hpp"
#include "argplan/plan_graph.hpp"
#include "templates_embedded.hpp"

namespace argplan {
namespace {

constexpr std::string_view kHeaderPrefix = "%% ";
constexpr std::string_view kSectionPrefix = "@@ ";

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::SchemaError, "template: " + what);
}

// Placeholders are {{name}}; returns referenced slot names in order of first use.
std::vector<Slot> placeholders(std::string_view content) {
  std::vector<Slot> out;
  std::size_t pos = 0;
  while ((pos = content.find("{{", pos)) != std::string_view::npos) {
    auto close = content.find("}}", pos + 2);
    if (close == std::string_view::npos) schema_error("unterminated placeholder");
    auto name = content.substr(pos + 2, close - pos - 2);
    auto slot = parse_slot(name);
    if (!slot) schema_error("unknown slot '" + std::string(name) + "'");
    if (std::find(out.begin(), out.end(), *slot) == out.end()) out.push_back(*slot);
    pos = close + 2;
  }
  return out;
}

std::string substitute(std::string_view content, const SlotMap& slots) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto open = content.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(content.substr(pos));
      return out;
    }
    out.append(content.substr(pos, open - pos));
    auto close = content.find("}}", open + 2);
    auto slot = parse_slot(content.substr(open + 2, close - open - 2));
    out.append(*slots.get(*slot));
    pos = close + 2;
  }
}

double temperature_for(const std::string& family, const PromptSettings& settings) {
  if (family == "alternatives") return settings.alternatives_temperature;
  if (family == "draft") return settings.draft_temperature;
  return settings.ideation_temperature;
}

struct TemplateTable {
  std::map<PromptTask, PromptTemplate> by_task;

  TemplateTable() {
    for (std::size_t i = 0; i < detail::kEmbeddedTemplateCount; ++i) {
      auto tmpl = parse_template(detail::kEmbeddedTemplates[i].text);
      by_task.emplace(tmpl.task, std::move(tmpl));
    }
  }
};

const TemplateTable& table() {
  static const TemplateTable instance;
  return instance;
}

RenderedPrompt render_template(const PromptTemplate& tmpl, PromptTask task, const SlotMap& slots,
                               const PromptSettings& settings) {
  for (const auto& section : tmpl.sections) {
    for (Slot slot : placeholders(section.content)) {
      const std::string* value = slots.get(slot);
      if (value == nullptr || is_blank(*value)) {
        throw Error(ErrorCode::MissingSlot, "task " + std::string(task_name(task)) +
                                                " requires slot " + std::string(slot_name(slot)));
      }
    }
  }
  RenderedPrompt prompt;
  prompt.task = task;
  prompt.temperature = temperature_for(tmpl.temperature_family, settings);
  prompt.messages.reserve(tmpl.sections.size());
  for (const auto& section : tmpl.sections) {
    prompt.messages.push_back({section.role, substitute(section.content, slots)});
  }
  return prompt;
}

}  // namespace

std::string_view task_name(PromptTask task) {
  switch (task) {
    case PromptTask::KeyAspects: return "key_aspects";
    case PromptTask::DiscussionPoints: return "discussion_points";
    case PromptTask::Counterarguments: return "counterarguments";
    case PromptTask::LogicalFallacies: return "logical_fallacies";
    case PromptTask::SupportingEvidence: return "supporting_evidence";
    case PromptTask::DraftKeyAspect: return "draft_key_aspect";
    case PromptTask::DraftDiscussionPoint: return "draft_discussion_point";
    case PromptTask::DraftCounterargument: return "draft_counterargument";
    case PromptTask::DraftSupportingEvidence: return "draft_supporting_evidence";
    case PromptTask::FixFallacies: return "fix_fallacies";
    case PromptTask::Alternatives: return "alternatives";
    case PromptTask::RefineWithInstruction: return "refine_with_instruction";
    case PromptTask::CascadeTopicSuggestions: return "cascade_topic_suggestions";
  }
  return "key_aspects";
}

std::optional<PromptTask> parse_task(std::string_view name) {
  for (auto task : kAllPromptTasks) {
    if (task_name(task) == name) return task;
  }
  return std::nullopt;
}

std::string_view slot_name(Slot slot) {
  switch (slot) {
    case Slot::SelectedArgument: return "selected_argument";
    case Slot::SelectedAspect: return "selected_aspect";
    case Slot::SelectedPoint: return "selected_point";
    case Slot::CounterArgument: return "counter_argument";
    case Slot::EvidenceType: return "evidence_type";
    case Slot::FallacyList: return "fallacy_list";
    case Slot::Instruction: return "instruction";
    case Slot::ParentContext: return "parent_context";
    case Slot::DraftPrompt: return "draft_prompt";
    case Slot::CurrentDraft: return "current_draft";
  }
  return "selected_argument";
}

std::optional<Slot> parse_slot(std::string_view name) {
  for (auto slot : {Slot::SelectedArgument, Slot::SelectedAspect, Slot::SelectedPoint,
                    Slot::CounterArgument, Slot::EvidenceType, Slot::FallacyList,
                    Slot::Instruction, Slot::ParentContext, Slot::DraftPrompt,
                    Slot::CurrentDraft}) {
    if (slot_name(slot) == name) return slot;
  }
  return std::nullopt;
}

PromptTemplate parse_template(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty() || lines.front().substr(0, kHeaderPrefix.size()) != kHeaderPrefix) {
    schema_error("missing '%%' header line");
  }
  PromptTemplate tmpl;
  bool have_task = false;
  std::istringstream header(std::string(lines.front().substr(kHeaderPrefix.size())));
  std::string field;
  while (header >> field) {
    auto eq = field.find('=');
    if (eq == std::string::npos) schema_error("bad header field '" + field + "'");
    auto key = field.substr(0, eq);
    auto value = field.substr(eq + 1);
    if (key == "task") {
      auto task = parse_task(value);
      if (!task) schema_error("unknown task '" + value + "'");
      tmpl.task = *task;
      have_task = true;
    } else if (key == "temperature") {
      if (value != "ideation" && value != "draft" && value != "alternatives") {
        schema_error("unknown temperature family '" + value + "'");
      }
      tmpl.temperature_family = value;
    } else if (key == "fewshot") {
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), tmpl.fewshot_pairs);
      if (ec != std::errc{} || ptr != value.data() + value.size()) schema_error("bad fewshot count");
    } else {
      schema_error("unknown header field '" + key + "'");
    }
  }
  if (!have_task || tmpl.temperature_family.empty()) schema_error("header needs task and temperature");

  std::vector<std::vector<std::string_view>> bodies;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto line = lines[i];
    if (line.substr(0, kSectionPrefix.size()) == kSectionPrefix) {
      auto role = parse_role(line.substr(kSectionPrefix.size()));
      if (!role) schema_error("unknown role in '" + std::string(line) + "'");
      tmpl.sections.push_back({*role, {}});
      bodies.emplace_back();
      continue;
    }
    if (tmpl.sections.empty()) {
      if (line.empty()) continue;
      schema_error("text before the first section");
    }
    bodies.back().push_back(line);
  }
  for (std::size_t i = 0; i < tmpl.sections.size(); ++i) {
    auto& body = bodies[i];
    while (!body.empty() && body.back().empty()) body.pop_back();
    std::string joined;
    for (std::size_t k = 0; k < body.size(); ++k) {
      if (k > 0) joined += '\n';
      joined += body[k];
    }
    tmpl.sections[i].content = std::move(joined);
  }

  if (tmpl.sections.empty() || tmpl.sections.front().role != ChatRole::System) {
    schema_error("first section must be the system role");
  }
  if (tmpl.sections.size() < 2 + 2 * tmpl.fewshot_pairs) schema_error("too few sections");
  for (std::size_t k = 0; k < tmpl.fewshot_pairs; ++k) {
    if (tmpl.sections[1 + 2 * k].role != ChatRole::User ||
        tmpl.sections[2 + 2 * k].role != ChatRole::Assistant) {
      schema_error("few-shot sections must alternate user/assistant");
    }
  }
  for (const auto& s : tmpl.sections) placeholders(s.content);  // validates slot names
  return tmpl;
}

const PromptTemplate& builtin_template(PromptTask task) {
  const auto& by_task = table().by_task;
  auto it = by_task.find(task);
  if (it == by_task.end()) {
    throw Error(ErrorCode::InvalidArgument,
                "no template file for task " + std::string(task_name(task)));
  }
  return it->second;
}

std::vector<Slot> required_slots(PromptTask task) {
  if (task == PromptTask::CascadeTopicSuggestions) task = PromptTask::KeyAspects;
  std::vector<Slot> out;
  for (const auto& section : builtin_template(task).sections) {
    for (Slot slot : placeholders(section.content)) {
      if (std::find(out.begin(), out.end(), slot) == out.end()) out.push_back(slot);
    }
  }
  return out;
}

RenderedPrompt render(PromptTask task, const SlotMap& slots, const PromptSettings& settings) {
  if (task == PromptTask::CascadeTopicSuggestions) {
    const std::string* aspect = slots.get(Slot::SelectedAspect);
    return render_cascade_topics((aspect != nullptr && !is_blank(*aspect))
                                     ? PromptTask::DiscussionPoints
                                     : PromptTask::KeyAspects,
                                 slots, settings);
  }
  return render_template(builtin_template(task), task, slots, settings);
}

RenderedPrompt render_cascade_topics(PromptTask reuse, const SlotMap& slots,
                                     const PromptSettings& settings) {
  switch (reuse) {
    case PromptTask::KeyAspects:
    case PromptTask::DiscussionPoints:
    case PromptTask::Counterarguments:
    case PromptTask::SupportingEvidence:
      break;
    default:
      throw Error(ErrorCode::InvalidArgument, "cascade topics cannot reuse task " +
                                                  std::string(task_name(reuse)));
  }
  return render_template(builtin_template(reuse), PromptTask::CascadeTopicSuggestions, slots,
                         settings);
}

}  // namespace argplan
