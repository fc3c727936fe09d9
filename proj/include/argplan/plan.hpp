#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "argplan/chat.hpp"
#include "argplan/clock.hpp"

namespace argplan {

using NodeId = std::string;

enum class NodeKind { MainArgument, KeyAspect, DiscussionPoint, Counterargument, SupportingEvidence };

/// Relation from a parent to its child; it fully determines the child's kind.
enum class EdgeKind { FeaturedBy, ElaboratedBy, AttackedBy, SupportedBy };

inline constexpr EdgeKind kAllEdgeKinds[] = {EdgeKind::FeaturedBy, EdgeKind::ElaboratedBy,
                                             EdgeKind::AttackedBy, EdgeKind::SupportedBy};

constexpr NodeKind kind_for_edge(EdgeKind edge) {
  switch (edge) {
    case EdgeKind::FeaturedBy: return NodeKind::KeyAspect;
    case EdgeKind::ElaboratedBy: return NodeKind::DiscussionPoint;
    case EdgeKind::AttackedBy: return NodeKind::Counterargument;
    case EdgeKind::SupportedBy: return NodeKind::SupportingEvidence;
  }
  return NodeKind::DiscussionPoint;
}

// snake_case names used in plan files, the HTTP API and the CLI.
std::string_view node_kind_name(NodeKind kind);
std::string_view edge_kind_name(EdgeKind edge);
std::optional<NodeKind> parse_node_kind(std::string_view name);
std::optional<EdgeKind> parse_edge_kind(std::string_view name);

struct DraftBlock {
  std::string text;
  bool stale = false;
  std::vector<std::string> history;
  std::vector<ChatTurn> refine_chat;

  bool operator==(const DraftBlock&) const = default;
};

struct PlanNode {
  NodeId id;
  NodeKind kind = NodeKind::MainArgument;
  std::optional<EdgeKind> edge_from_parent;  // absent iff root
  std::string prompt_text;
  std::optional<DraftBlock> draft;
  std::vector<PlanNode> children;
  std::uint64_t color_index = 0;

  bool operator==(const PlanNode&) const = default;
};

struct ArgumentPlan {
  std::string id;
  PlanNode root;
  bool lazy_mode = false;
  Timestamp created_at{};
  Timestamp modified_at{};
  /// Creation counter: the next node gets this color index and id suffix.
  std::uint64_t next_color = 0;

  bool operator==(const ArgumentPlan&) const = default;
};

/// A node needs generation when it has no draft or its draft is stale.
/// The root never does; its block is its own prompt_text.
bool needs_generation(const ArgumentPlan& plan, const PlanNode& node);

}  // namespace argplan
