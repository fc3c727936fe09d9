#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace argplan {

/// Outcome of parsing a completion. Parsers never throw on arbitrary text;
/// a failure carries a reason instead of items.
template <typename T>
struct Parsed {
  std::vector<T> items;
  std::optional<std::string> failure;

  bool ok() const { return !failure.has_value(); }
};

struct FallacySuggestion {
  std::string name;
  std::string explanation;

  bool operator==(const FallacySuggestion&) const = default;
};

enum class EvidenceStrategy { Ethos, Pathos, Logos, Example };

std::string_view strategy_name(EvidenceStrategy strategy);
std::optional<EvidenceStrategy> parse_strategy(std::string_view name);

struct EvidenceSuggestion {
  EvidenceStrategy strategy = EvidenceStrategy::Example;
  std::string description;

  bool operator==(const EvidenceSuggestion&) const = default;
};

/// Items from lines starting with "N.", "N)", "-", "*" or a bullet glyph.
/// Indented follow-on lines continue the previous item; other lines are ignored.
Parsed<std::string> parse_numbered_list(std::string_view raw);

/// Each item split at its first colon into name and explanation. Items
/// without a colon or with an empty side are dropped.
Parsed<FallacySuggestion> parse_fallacies(std::string_view raw);

/// Items tagged "(ethos)", "(pathos)", "(logos)" or "(example)"; the tag is
/// removed from the description. Untagged items default to example.
Parsed<EvidenceSuggestion> parse_evidence(std::string_view raw);

/// "1. a\n2. b": inverse of parse_numbered_list for single-line items.
std::string format_as_numbered(const std::vector<std::string>& items);

/// Prompt text stored for an accepted evidence suggestion: "logos: description".
std::string evidence_prompt_text(const EvidenceSuggestion& evidence);

}  // namespace argplan
