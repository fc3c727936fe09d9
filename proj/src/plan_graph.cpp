#include "argplan/plan_graph.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "argplan/error.hpp"
#include "argplan/hash.hpp"

namespace argplan {
namespace {

struct Located {
  PlanNode* node = nullptr;
  PlanNode* parent = nullptr;
};

Located locate(PlanNode& at, PlanNode* parent, std::string_view id) {
  if (at.id == id) return {&at, parent};
  for (auto& child : at.children) {
    if (auto hit = locate(child, &at, id); hit.node != nullptr) return hit;
  }
  return {};
}

Located locate_or_throw(ArgumentPlan& plan, std::string_view id) {
  auto hit = locate(plan.root, nullptr, id);
  if (hit.node == nullptr) {
    throw Error(ErrorCode::UnknownNode, "unknown node: " + std::string(id));
  }
  return hit;
}

void preorder(const PlanNode& node, std::vector<NodeId>& out) {
  out.push_back(node.id);
  for (const auto& child : node.children) preorder(child, out);
}

std::vector<NodeId> stale_subtree(PlanNode& node) {
  std::vector<NodeId> ids;
  auto visit = [&ids](auto&& self, PlanNode& n) -> void {
    ids.push_back(n.id);
    if (n.draft) n.draft->stale = true;
    for (auto& c : n.children) self(self, c);
  };
  visit(visit, node);
  return ids;
}

bool contains(const PlanNode& subtree, std::string_view id) {
  if (subtree.id == id) return true;
  return std::any_of(subtree.children.begin(), subtree.children.end(),
                     [id](const PlanNode& c) { return contains(c, id); });
}

void require_text(std::string_view text) {
  if (is_blank(text)) throw Error(ErrorCode::EmptyArgument, "text must not be blank");
}

void touch(ArgumentPlan& plan) { plan.modified_at = now(); }

}  // namespace

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

ArgumentPlan new_plan(std::string_view argument_text, std::string id) {
  require_text(argument_text);
  ArgumentPlan plan;
  plan.created_at = now();
  plan.modified_at = plan.created_at;
  plan.id = id.empty()
                ? "plan-" + sha256_hex(std::string(argument_text) + "\n" +
                                       format_timestamp(plan.created_at))
                                .substr(0, 12)
                : std::move(id);
  plan.root.id = "n0";
  plan.root.kind = NodeKind::MainArgument;
  plan.root.prompt_text = std::string(argument_text);
  plan.root.color_index = 0;
  plan.next_color = 1;
  return plan;
}

const PlanNode* find_node(const ArgumentPlan& plan, std::string_view id) {
  return locate(const_cast<PlanNode&>(plan.root), nullptr, id).node;
}

PlanNode* find_node(ArgumentPlan& plan, std::string_view id) {
  return locate(plan.root, nullptr, id).node;
}

const PlanNode& node_at(const ArgumentPlan& plan, std::string_view id) {
  return *locate_or_throw(const_cast<ArgumentPlan&>(plan), id).node;
}

PlanNode& node_at(ArgumentPlan& plan, std::string_view id) {
  return *locate_or_throw(plan, id).node;
}

const PlanNode* parent_of(const ArgumentPlan& plan, std::string_view id) {
  return locate_or_throw(const_cast<ArgumentPlan&>(plan), id).parent;
}

std::size_t depth_of(const ArgumentPlan& plan, std::string_view id) {
  std::size_t depth = 0;
  const PlanNode* parent = parent_of(plan, id);
  while (parent != nullptr) {
    ++depth;
    parent = parent_of(plan, parent->id);
  }
  return depth;
}

std::size_t node_count(const ArgumentPlan& plan) { return document_order(plan).size(); }

NodeId add_child(ArgumentPlan& plan, std::string_view parent_id, EdgeKind edge,
                 std::string_view text) {
  PlanNode& parent = node_at(plan, parent_id);
  require_text(text);
  PlanNode child;
  child.color_index = plan.next_color++;
  child.id = "n" + std::to_string(child.color_index);
  child.kind = kind_for_edge(edge);
  child.edge_from_parent = edge;
  child.prompt_text = std::string(text);
  parent.children.push_back(std::move(child));
  touch(plan);
  return parent.children.back().id;
}

std::vector<NodeId> set_edge_kind(ArgumentPlan& plan, std::string_view node_id, EdgeKind edge) {
  auto hit = locate_or_throw(plan, node_id);
  if (hit.parent == nullptr) {
    throw Error(ErrorCode::RootEdgeForbidden, "the main argument has no incoming edge");
  }
  hit.node->edge_from_parent = edge;
  hit.node->kind = kind_for_edge(edge);
  auto affected = stale_subtree(*hit.node);
  touch(plan);
  return affected;
}

std::vector<NodeId> move_node(ArgumentPlan& plan, std::string_view node_id,
                              std::string_view new_parent_id, EdgeKind edge) {
  auto hit = locate_or_throw(plan, node_id);
  if (hit.parent == nullptr) {
    throw Error(ErrorCode::RootEdgeForbidden, "the main argument cannot be moved");
  }
  locate_or_throw(plan, new_parent_id);
  if (contains(*hit.node, new_parent_id)) {
    throw Error(ErrorCode::CycleForbidden,
                "cannot move " + std::string(node_id) + " under its own subtree");
  }
  auto& siblings = hit.parent->children;
  auto pos = std::find_if(siblings.begin(), siblings.end(),
                          [&](const PlanNode& n) { return n.id == node_id; });
  PlanNode moved = std::move(*pos);
  siblings.erase(pos);
  moved.edge_from_parent = edge;
  moved.kind = kind_for_edge(edge);
  // Sibling erasure may have shifted the target, so look it up again.
  PlanNode& target = node_at(plan, new_parent_id);
  target.children.push_back(std::move(moved));
  auto affected = stale_subtree(target.children.back());
  touch(plan);
  return affected;
}

std::size_t remove_subtree(ArgumentPlan& plan, std::string_view node_id) {
  auto hit = locate_or_throw(plan, node_id);
  if (hit.parent == nullptr) {
    throw Error(ErrorCode::RootRemovalForbidden, "the main argument cannot be removed");
  }
  std::vector<NodeId> ids;
  preorder(*hit.node, ids);
  auto& siblings = hit.parent->children;
  siblings.erase(std::find_if(siblings.begin(), siblings.end(),
                              [&](const PlanNode& n) { return n.id == node_id; }));
  touch(plan);
  return ids.size();
}

std::vector<NodeId> edit_prompt_text(ArgumentPlan& plan, std::string_view node_id,
                                     std::string_view new_text) {
  PlanNode& node = node_at(plan, node_id);
  require_text(new_text);
  node.prompt_text = std::string(new_text);
  auto affected = stale_subtree(node);
  touch(plan);
  return affected;
}

void reorder_child(ArgumentPlan& plan, std::string_view parent_id, std::size_t from_index,
                   std::size_t to_index) {
  auto& children = node_at(plan, parent_id).children;
  if (from_index >= children.size() || to_index >= children.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "reorder index out of range (" + std::to_string(children.size()) + " children)");
  }
  auto first = children.begin();
  if (from_index < to_index) {
    std::rotate(first + from_index, first + from_index + 1, first + to_index + 1);
  } else if (from_index > to_index) {
    std::rotate(first + to_index, first + from_index, first + from_index + 1);
  }
  touch(plan);
}

std::size_t child_index(const ArgumentPlan& plan, std::string_view node_id) {
  const PlanNode* parent = parent_of(plan, node_id);
  if (parent == nullptr) {
    throw Error(ErrorCode::RootEdgeForbidden, "the main argument has no parent");
  }
  const auto& siblings = parent->children;
  return static_cast<std::size_t>(
      std::find_if(siblings.begin(), siblings.end(),
                   [&](const PlanNode& n) { return n.id == node_id; }) -
      siblings.begin());
}

std::vector<NodeId> document_order(const ArgumentPlan& plan) {
  std::vector<NodeId> out;
  preorder(plan.root, out);
  return out;
}

std::vector<NodeId> dependents(const ArgumentPlan& plan, std::string_view node_id) {
  std::vector<NodeId> out;
  preorder(node_at(plan, node_id), out);
  out.erase(out.begin());
  return out;
}

NodeId add_to_graph(ArgumentPlan& plan, std::string_view selected_text,
                    std::optional<std::string_view> anchor_id) {
  require_text(selected_text);
  const std::string parent = anchor_id ? std::string(*anchor_id) : plan.root.id;
  return add_child(plan, parent, EdgeKind::ElaboratedBy, selected_text);
}

std::uint64_t color_of(const ArgumentPlan& plan, std::string_view node_id) {
  return node_at(plan, node_id).color_index;
}

std::vector<NodeId> nodes_needing_generation(const ArgumentPlan& plan) {
  std::vector<NodeId> out;
  auto visit = [&](auto&& self, const PlanNode& n) -> void {
    if (needs_generation(plan, n)) out.push_back(n.id);
    for (const auto& c : n.children) self(self, c);
  };
  visit(visit, plan.root);
  return out;
}

std::vector<std::string> validate_plan(const ArgumentPlan& plan) {
  std::vector<std::string> problems;
  if (plan.root.kind != NodeKind::MainArgument) problems.push_back("root kind is not main_argument");
  if (plan.root.edge_from_parent) problems.push_back("root has an incoming edge");
  if (plan.root.draft) problems.push_back("root carries a draft");
  std::set<NodeId> seen;
  auto visit = [&](auto&& self, const PlanNode& n, bool is_root) -> void {
    if (!seen.insert(n.id).second) problems.push_back("duplicate node id " + n.id);
    if (is_blank(n.prompt_text)) problems.push_back("blank prompt text on " + n.id);
    if (n.color_index >= plan.next_color) {
      problems.push_back("color index of " + n.id + " not below creation counter");
    }
    if (!is_root) {
      if (!n.edge_from_parent) {
        problems.push_back("non-root node " + n.id + " lacks an edge");
      } else if (n.kind != kind_for_edge(*n.edge_from_parent)) {
        problems.push_back("kind/edge mismatch on " + n.id);
      }
    }
    for (const auto& c : n.children) self(self, c, false);
  };
  visit(visit, plan.root, true);
  return problems;
}

}  // namespace argplan
