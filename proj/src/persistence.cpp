#include "argplan/persistence.hpp"

#include <set>

#include "argplan/error.hpp"
#include "argplan/io.hpp"
#include "argplan/plan_graph.hpp"

namespace argplan {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& message) {
  throw Error(ErrorCode::SchemaError, "plan file: " + message);
}

void expect_keys(const json& obj, std::string_view what, const std::set<std::string>& required,
                 const std::set<std::string>& optional = {}) {
  if (!obj.is_object()) schema_error(std::string(what) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!required.count(key) && !optional.count(key)) {
      schema_error("unknown field \"" + key + "\" in " + std::string(what));
    }
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) schema_error("missing field \"" + key + "\" in " + std::string(what));
  }
}

template <typename T>
T get_as(const json& obj, const char* key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    schema_error(std::string("field \"") + key + "\" has the wrong type");
  }
}

Timestamp get_time(const json& obj, const char* key) {
  auto parsed = parse_timestamp(get_as<std::string>(obj, key));
  if (!parsed) schema_error(std::string("field \"") + key + "\" is not an RFC 3339 UTC time");
  return *parsed;
}

json draft_to_json(const DraftBlock& draft) {
  json chat = json::array();
  for (const auto& turn : draft.refine_chat) {
    chat.push_back({{"role", role_name(turn.role)},
                    {"content", turn.content},
                    {"timestamp", format_timestamp(turn.timestamp)}});
  }
  return {{"text", draft.text},
          {"stale", draft.stale},
          {"history", draft.history},
          {"refine_chat", std::move(chat)}};
}

DraftBlock draft_from_json(const json& doc) {
  expect_keys(doc, "draft", {"text", "stale", "history", "refine_chat"});
  DraftBlock draft;
  draft.text = get_as<std::string>(doc, "text");
  draft.stale = get_as<bool>(doc, "stale");
  draft.history = get_as<std::vector<std::string>>(doc, "history");
  if (!doc["refine_chat"].is_array()) schema_error("refine_chat must be an array");
  for (const auto& turn : doc["refine_chat"]) {
    expect_keys(turn, "chat turn", {"role", "content", "timestamp"});
    auto role = parse_role(get_as<std::string>(turn, "role"));
    if (!role) schema_error("unknown chat role");
    draft.refine_chat.push_back(
        {*role, get_as<std::string>(turn, "content"), get_time(turn, "timestamp")});
  }
  return draft;
}

PlanNode node_from_json(const json& doc) {
  expect_keys(doc, "node", {"id", "kind", "prompt_text", "color_index", "draft", "children"},
              {"edge"});
  PlanNode node;
  node.id = get_as<std::string>(doc, "id");
  auto kind = parse_node_kind(get_as<std::string>(doc, "kind"));
  if (!kind) schema_error("unknown node kind in node " + node.id);
  node.kind = *kind;
  if (doc.contains("edge")) {
    auto edge = parse_edge_kind(get_as<std::string>(doc, "edge"));
    if (!edge) schema_error("unknown edge kind in node " + node.id);
    node.edge_from_parent = *edge;
  }
  node.prompt_text = get_as<std::string>(doc, "prompt_text");
  node.color_index = get_as<std::uint64_t>(doc, "color_index");
  if (!doc["draft"].is_null()) node.draft = draft_from_json(doc["draft"]);
  if (!doc["children"].is_array()) schema_error("children must be an array");
  for (const auto& child : doc["children"]) node.children.push_back(node_from_json(child));
  return node;
}

void markdown_lines(const PlanNode& node, std::size_t depth, std::string& out) {
  static constexpr std::string_view kTags[] = {"", "[aspect] ", "[point] ", "[counter] ",
                                                "[evidence] "};
  out.append(depth * 2, ' ');
  out += "- ";
  out += kTags[static_cast<int>(node.kind)];
  out += node.prompt_text;
  out += '\n';
  for (const auto& child : node.children) markdown_lines(child, depth + 1, out);
}

}  // namespace

json node_to_json(const PlanNode& node) {
  json doc = {{"id", node.id},
              {"kind", node_kind_name(node.kind)},
              {"prompt_text", node.prompt_text},
              {"color_index", node.color_index},
              {"draft", node.draft ? draft_to_json(*node.draft) : json(nullptr)},
              {"children", json::array()}};
  if (node.edge_from_parent) doc["edge"] = edge_kind_name(*node.edge_from_parent);
  for (const auto& child : node.children) doc["children"].push_back(node_to_json(child));
  return doc;
}

json plan_to_json(const ArgumentPlan& plan) {
  return {{"id", plan.id},
          {"lazy_mode", plan.lazy_mode},
          {"created_at", format_timestamp(plan.created_at)},
          {"modified_at", format_timestamp(plan.modified_at)},
          {"next_color", plan.next_color},
          {"root", node_to_json(plan.root)}};
}

ArgumentPlan plan_from_json(const json& doc) {
  expect_keys(doc, "plan", {"id", "lazy_mode", "created_at", "modified_at", "next_color", "root"});
  ArgumentPlan plan;
  plan.id = get_as<std::string>(doc, "id");
  plan.lazy_mode = get_as<bool>(doc, "lazy_mode");
  plan.created_at = get_time(doc, "created_at");
  plan.modified_at = get_time(doc, "modified_at");
  plan.next_color = get_as<std::uint64_t>(doc, "next_color");
  plan.root = node_from_json(doc["root"]);
  if (auto violations = validate_plan(plan); !violations.empty()) schema_error(violations.front());
  return plan;
}

std::string serialize_plan(const ArgumentPlan& plan) {
  json doc = {{"version", kPlanFileVersion}, {"plan", plan_to_json(plan)}};
  return doc.dump(2) + "\n";
}

ArgumentPlan deserialize_plan(std::string_view text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) schema_error("not valid JSON");
  if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer()) {
    schema_error("missing integer \"version\"");
  }
  const auto version = doc["version"].get<long long>();
  if (version != kPlanFileVersion) {
    schema_error("unsupported version " + std::to_string(version) + " (this build reads version " +
                 std::to_string(kPlanFileVersion) + ")");
  }
  expect_keys(doc, "file", {"version", "plan"});
  return plan_from_json(doc["plan"]);
}

void save_plan(const ArgumentPlan& plan, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_plan(plan));
}

ArgumentPlan load_plan(const std::filesystem::path& path) { return deserialize_plan(read_file(path)); }

std::string export_markdown(const ArgumentPlan& plan) {
  std::string out;
  markdown_lines(plan.root, 0, out);
  return out;
}

std::string export_text(const ArgumentPlan& plan) {
  std::string out = plan.root.prompt_text;
  for (const auto& id : document_order(plan)) {
    const PlanNode& node = node_at(plan, id);
    if (&node == &plan.root) continue;
    out += "\n\n";
    out += node.draft ? node.draft->text : "[" + node.prompt_text + "]";
  }
  out += '\n';
  return out;
}

}  // namespace argplan
