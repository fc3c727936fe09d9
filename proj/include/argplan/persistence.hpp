#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "argplan/plan.hpp"

namespace argplan {

inline constexpr int kPlanFileVersion = 1;

// Plan <-> JSON. The same encoding is used for plan files and HTTP bodies.
nlohmann::json node_to_json(const PlanNode& node);
nlohmann::json plan_to_json(const ArgumentPlan& plan);
/// Throws SchemaError on unknown or missing fields and on structural violations.
ArgumentPlan plan_from_json(const nlohmann::json& doc);

/// Canonical file bytes: {"plan":...,"version":1}, sorted keys, two-space
/// indent, trailing newline.
std::string serialize_plan(const ArgumentPlan& plan);
ArgumentPlan deserialize_plan(std::string_view text);

void save_plan(const ArgumentPlan& plan, const std::filesystem::path& path);
ArgumentPlan load_plan(const std::filesystem::path& path);

/// Nested "- " bullets, two spaces per level, non-root lines tagged by kind
/// ("[aspect]", "[point]", "[counter]", "[evidence]").
std::string export_markdown(const ArgumentPlan& plan);

/// The thesis, then one block per node in document order: its draft text, or
/// "[goal text]" when undrafted. Blocks are separated by a blank line.
std::string export_text(const ArgumentPlan& plan);

}  // namespace argplan
