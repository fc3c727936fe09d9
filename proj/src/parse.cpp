#include "argplan/parse.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace argplan {
namespace {

constexpr std::string_view kBulletGlyph = "\xE2\x80\xA2";  // U+2022

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Length of the list marker plus following whitespace, or 0 if `line`
// (already left-trimmed) does not start a list item.
std::size_t marker_length(std::string_view line) {
  std::size_t pos = 0;
  if (!line.empty() && std::isdigit(static_cast<unsigned char>(line[0])) != 0) {
    while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos])) != 0) ++pos;
    if (pos >= line.size() || (line[pos] != '.' && line[pos] != ')')) return 0;
    ++pos;
  } else if (line.substr(0, kBulletGlyph.size()) == kBulletGlyph) {
    pos = kBulletGlyph.size();
  } else if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
    pos = 1;
  } else {
    return 0;
  }
  if (pos >= line.size() || !is_space(line[pos])) return 0;
  while (pos < line.size() && is_space(line[pos])) ++pos;
  return pos;
}

// Removes emphasis markers wrapping the whole item, e.g. "**x**" or "_x_".
std::string_view strip_emphasis(std::string_view s) {
  s = trim(s);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::string_view mark : {"**", "__", "*", "_"}) {
      if (s.size() > 2 * mark.size() && s.substr(0, mark.size()) == mark &&
          s.substr(s.size() - mark.size()) == mark) {
        s = trim(s.substr(mark.size(), s.size() - 2 * mark.size()));
        changed = true;
        break;
      }
    }
  }
  return s;
}

std::string_view strip_marker_runs(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.front() == '*' || s.front() == '_')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == '*' || s.back() == '_')) s.remove_suffix(1);
  return trim(s);
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view strategy_name(EvidenceStrategy strategy) {
  switch (strategy) {
    case EvidenceStrategy::Ethos: return "ethos";
    case EvidenceStrategy::Pathos: return "pathos";
    case EvidenceStrategy::Logos: return "logos";
    case EvidenceStrategy::Example: return "example";
  }
  return "example";
}

std::optional<EvidenceStrategy> parse_strategy(std::string_view name) {
  const auto lower = lowercase(name);
  for (auto s : {EvidenceStrategy::Ethos, EvidenceStrategy::Pathos, EvidenceStrategy::Logos,
                 EvidenceStrategy::Example}) {
    if (strategy_name(s) == lower) return s;
  }
  return std::nullopt;
}

Parsed<std::string> parse_numbered_list(std::string_view raw) {
  Parsed<std::string> result;
  std::vector<std::string> items;
  bool in_item = false;
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    auto line = raw.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto body = trim(line);
    if (body.empty()) {
      in_item = false;
      continue;
    }
    if (auto len = marker_length(body); len > 0) {
      items.emplace_back(body.substr(len));
      in_item = true;
    } else if (in_item && is_space(line.front())) {
      items.back() += ' ';
      items.back() += body;
    } else {
      in_item = false;
    }
  }
  for (auto& item : items) {
    auto cleaned = strip_emphasis(item);
    if (!cleaned.empty()) result.items.emplace_back(cleaned);
  }
  if (result.items.empty()) result.failure = "no list items found";
  return result;
}

Parsed<FallacySuggestion> parse_fallacies(std::string_view raw) {
  Parsed<FallacySuggestion> result;
  auto list = parse_numbered_list(raw);
  if (!list.ok()) {
    result.failure = list.failure;
    return result;
  }
  for (const auto& item : list.items) {
    auto colon = item.find(':');
    if (colon == std::string::npos) continue;
    auto name = strip_marker_runs(std::string_view(item).substr(0, colon));
    auto explanation = strip_marker_runs(std::string_view(item).substr(colon + 1));
    if (name.empty() || explanation.empty()) continue;
    result.items.push_back({std::string(name), std::string(explanation)});
  }
  if (result.items.empty()) result.failure = "no item of the form 'Name: explanation'";
  return result;
}

Parsed<EvidenceSuggestion> parse_evidence(std::string_view raw) {
  Parsed<EvidenceSuggestion> result;
  auto list = parse_numbered_list(raw);
  if (!list.ok()) {
    result.failure = list.failure;
    return result;
  }
  for (const auto& item : list.items) {
    EvidenceSuggestion suggestion;
    std::string text = item;
    const auto lower = lowercase(item);
    for (auto s : {EvidenceStrategy::Ethos, EvidenceStrategy::Pathos, EvidenceStrategy::Logos,
                   EvidenceStrategy::Example}) {
      const std::string tag = "(" + std::string(strategy_name(s)) + ")";
      auto at = lower.find(tag);
      if (at == std::string::npos) continue;
      suggestion.strategy = s;
      auto erase_from = at;
      if (erase_from > 0 && text[erase_from - 1] == ' ') --erase_from;
      text.erase(erase_from, at + tag.size() - erase_from);
      break;
    }
    auto description = strip_emphasis(text);
    if (description.empty()) continue;
    suggestion.description = std::string(description);
    result.items.push_back(std::move(suggestion));
  }
  if (result.items.empty()) result.failure = "no evidence items found";
  return result;
}

std::string format_as_numbered(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += '\n';
    out += std::to_string(i + 1) + ". " + items[i];
  }
  return out;
}

std::string evidence_prompt_text(const EvidenceSuggestion& evidence) {
  return std::string(strategy_name(evidence.strategy)) + ": " + evidence.description;
}

}  // namespace argplan
