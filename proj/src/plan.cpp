#include "argplan/plan.hpp"

#include "argplan/chat.hpp"

namespace argplan {

std::string_view role_name(ChatRole role) {
  switch (role) {
    case ChatRole::System: return "system";
    case ChatRole::User: return "user";
    case ChatRole::Assistant: return "assistant";
  }
  return "user";
}

std::optional<ChatRole> parse_role(std::string_view name) {
  if (name == "system") return ChatRole::System;
  if (name == "user") return ChatRole::User;
  if (name == "assistant") return ChatRole::Assistant;
  return std::nullopt;
}

std::string_view node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::MainArgument: return "main_argument";
    case NodeKind::KeyAspect: return "key_aspect";
    case NodeKind::DiscussionPoint: return "discussion_point";
    case NodeKind::Counterargument: return "counterargument";
    case NodeKind::SupportingEvidence: return "supporting_evidence";
  }
  return "main_argument";
}

std::string_view edge_kind_name(EdgeKind edge) {
  switch (edge) {
    case EdgeKind::FeaturedBy: return "featured_by";
    case EdgeKind::ElaboratedBy: return "elaborated_by";
    case EdgeKind::AttackedBy: return "attacked_by";
    case EdgeKind::SupportedBy: return "supported_by";
  }
  return "elaborated_by";
}

std::optional<NodeKind> parse_node_kind(std::string_view name) {
  for (auto kind : {NodeKind::MainArgument, NodeKind::KeyAspect, NodeKind::DiscussionPoint,
                    NodeKind::Counterargument, NodeKind::SupportingEvidence}) {
    if (node_kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

std::optional<EdgeKind> parse_edge_kind(std::string_view name) {
  for (auto edge : kAllEdgeKinds) {
    if (edge_kind_name(edge) == name) return edge;
  }
  return std::nullopt;
}

bool needs_generation(const ArgumentPlan& plan, const PlanNode& node) {
  if (&node == &plan.root || node.id == plan.root.id) return false;
  return !node.draft.has_value() || node.draft->stale;
}

}  // namespace argplan
