#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argplan/plan.hpp"

namespace argplan {

/// Number of distinct tints the UI cycles through; color_index is taken modulo this.
inline constexpr std::size_t kPaletteSize = 12;

/// Creates a one-node plan whose root holds `argument_text`. When `id` is empty
/// a content-derived id is assigned. Throws EmptyArgument for blank text.
ArgumentPlan new_plan(std::string_view argument_text, std::string id = {});

const PlanNode* find_node(const ArgumentPlan& plan, std::string_view id);
PlanNode* find_node(ArgumentPlan& plan, std::string_view id);

// Throwing lookups (UnknownNode).
const PlanNode& node_at(const ArgumentPlan& plan, std::string_view id);
PlanNode& node_at(ArgumentPlan& plan, std::string_view id);

/// Parent of `id`, or nullptr for the root. Throws UnknownNode.
const PlanNode* parent_of(const ArgumentPlan& plan, std::string_view id);

/// Root has depth 0.
std::size_t depth_of(const ArgumentPlan& plan, std::string_view id);
std::size_t node_count(const ArgumentPlan& plan);

NodeId add_child(ArgumentPlan& plan, std::string_view parent_id, EdgeKind edge, std::string_view text);

/// Changes the relation to the parent and recomputes the kind.
/// Returns the stale set: the node and its descendants in document order.
std::vector<NodeId> set_edge_kind(ArgumentPlan& plan, std::string_view node_id, EdgeKind edge);

/// Re-parents a subtree as the last child of `new_parent_id`.
/// Returns the stale set: the moved node and its descendants in document order.
std::vector<NodeId> move_node(ArgumentPlan& plan, std::string_view node_id,
                              std::string_view new_parent_id, EdgeKind edge);

std::size_t remove_subtree(ArgumentPlan& plan, std::string_view node_id);

/// Replaces the goal text. Any edit, identical text included, stales the
/// node and its subtree; the returned list feeds cascade_update.
std::vector<NodeId> edit_prompt_text(ArgumentPlan& plan, std::string_view node_id,
                                     std::string_view new_text);

void reorder_child(ArgumentPlan& plan, std::string_view parent_id, std::size_t from_index,
                   std::size_t to_index);

/// Index of `node_id` among its parent's children. Throws for the root.
std::size_t child_index(const ArgumentPlan& plan, std::string_view node_id);

/// Pre-order: each node precedes its children, children in stored order.
std::vector<NodeId> document_order(const ArgumentPlan& plan);

/// Strict descendants of `node_id` in document order.
std::vector<NodeId> dependents(const ArgumentPlan& plan, std::string_view node_id);

/// Attaches user-selected text as an ElaboratedBy child of `anchor_id`, or of
/// the root when no anchor is given.
NodeId add_to_graph(ArgumentPlan& plan, std::string_view selected_text,
                    std::optional<std::string_view> anchor_id = std::nullopt);

std::uint64_t color_of(const ArgumentPlan& plan, std::string_view node_id);

/// Ids of nodes that need generation, in document order.
std::vector<NodeId> nodes_needing_generation(const ArgumentPlan& plan);

/// Structural checks (single root, unique ids, kind/edge agreement, color
/// counter ahead of every node). Returns human-readable violations; empty when valid.
std::vector<std::string> validate_plan(const ArgumentPlan& plan);

/// True when `text` is empty or whitespace only.
bool is_blank(std::string_view text);

}  // namespace argplan
