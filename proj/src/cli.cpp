#include "argplan/cli.hpp"

#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "argplan/draft.hpp"
#include "argplan/error.hpp"
#include "argplan/http_provider.hpp"
#include "argplan/ideation.hpp"
#include "argplan/persistence.hpp"
#include "argplan/plan_graph.hpp"
#include "argplan/service.hpp"
#include "argplan/session.hpp"

namespace argplan {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProviderOptions {
  std::string kind = "live";
  std::string replay_store;
  bool record = false;
};

/// Builds the configured backend on first use, so commands that never
/// complete a prompt do not need a replay store or network settings.
class DeferredProvider : public LlmProvider {
 public:
  explicit DeferredProvider(ProviderOptions options) : options_(std::move(options)) {}

  std::string complete(const RenderedPrompt& prompt) override {
    std::call_once(built_, [this] { build(); });
    return inner_->complete(prompt);
  }

  /// Writes newly recorded responses back to the replay store file.
  void flush() {
    if (store_ && options_.record) store_->save(options_.replay_store);
  }

 private:
  void build() {
    if (options_.kind == "live") {
      inner_ = std::make_shared<HttpProvider>(ProviderConfig::from_env());
      return;
    }
    if (options_.replay_store.empty()) throw UsageError("--provider replay needs --replay-store");
    const bool missing = !std::filesystem::exists(options_.replay_store);
    store_ = std::make_shared<ReplayStore>(missing && options_.record
                                               ? ReplayStore()
                                               : ReplayStore::load(options_.replay_store));
    if (options_.record) {
      inner_ = std::make_shared<ReplayProvider>(
          store_, ReplayProvider::Mode::Record,
          std::make_shared<HttpProvider>(ProviderConfig::from_env()));
    } else {
      inner_ = std::make_shared<ReplayProvider>(store_);
    }
  }

  ProviderOptions options_;
  std::once_flag built_;
  std::shared_ptr<LlmProvider> inner_;
  std::shared_ptr<ReplayStore> store_;
};

EdgeKind parse_edge_or_usage(const std::string& name) {
  auto edge = parse_edge_kind(name);
  if (!edge) throw UsageError("unknown edge kind \"" + name + "\"");
  return *edge;
}

/// 1-based comma-separated indices into a list of `count` items.
std::vector<std::size_t> parse_picks(const std::string& text, std::size_t count) {
  std::vector<std::size_t> picks;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, ',')) {
    const auto first = part.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = part.find_last_not_of(" \t");
    part = part.substr(first, last - first + 1);
    if (part.find_first_not_of("0123456789") != std::string::npos || part.size() > 9) {
      throw UsageError("bad selection \"" + part + "\"");
    }
    const auto index = std::stoul(part);
    if (index < 1 || index > count) {
      throw UsageError("selection " + part + " is out of range 1.." + std::to_string(count));
    }
    picks.push_back(index - 1);
  }
  return picks;
}

class Cli {
 public:
  Cli(std::istream& in, std::ostream& out, std::ostream& err) : in_(in), out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  void print_list(const std::vector<std::string>& items, std::size_t first_number = 1) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      out_ << (first_number + i) << ". " << items[i] << '\n';
    }
  }

  std::vector<std::size_t> select(const std::optional<std::string>& pick, std::size_t count) {
    if (pick) return parse_picks(*pick, count);
    if (count == 0) return {};
    out_ << "Select items (comma-separated numbers, empty for none): " << std::flush;
    std::string line;
    std::getline(in_, line);
    return parse_picks(line, count);
  }

  PlanSession open(const std::string& file) {
    file_ = file;
    return PlanSession(load_plan(file), provider_, {});
  }

  /// Marks the plan as changed; it is saved even when a later generation
  /// step fails.
  void touched(PlanSession& session) { pending_ = &session; }

  void save(PlanSession& session) {
    save_plan(session.plan(), file_);
    pending_ = nullptr;
  }

  void report_generated(const PlanSession& session) {
    for (const auto& id : session.last_generated()) out_ << "drafted " << id << '\n';
  }

  void print_tree(const ArgumentPlan& plan);

  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
  ProviderOptions options_;
  std::shared_ptr<DeferredProvider> provider_;
  std::string file_;
  PlanSession* pending_ = nullptr;
};

void Cli::print_tree(const ArgumentPlan& plan) {
  for (const auto& id : document_order(plan)) {
    const PlanNode& node = node_at(plan, id);
    out_ << std::string(depth_of(plan, id) * 2, ' ') << node.id << ' ' << node_kind_name(node.kind);
    if (node.edge_from_parent) out_ << " (" << edge_kind_name(*node.edge_from_parent) << ')';
    out_ << ": " << node.prompt_text;
    if (node.draft && node.draft->stale) {
      out_ << " [stale]";
    } else if (needs_generation(plan, node)) {
      out_ << " [no draft]";
    }
    out_ << '\n';
  }
}

int Cli::run(const std::vector<std::string>& args) {
  CLI::App app{"Plan argumentative essays as a typed argument tree with LLM-backed suggestions and drafts",
               "argplan"};
  app.require_subcommand(1);
  app.add_option("--provider", options_.kind, "Completion backend")
      ->check(CLI::IsMember({"live", "replay"}));
  app.add_option("--replay-store", options_.replay_store, "Replay store JSON file");
  app.add_flag("--record", options_.record,
               "With --provider replay: send misses to the live backend and store the answers");

  std::string file, text, node, parent, edge, format, state, message;
  std::optional<std::string> pick;
  std::optional<std::string> node_opt;
  std::string aspects, kind;
  std::string output;
  std::size_t to_index = 0;
  int count = 3;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string store_dir = "plans";

  auto* new_cmd = app.add_subcommand("new", "Create a plan from a main argument");
  new_cmd->add_option("argument", text, "Main argument")->required();
  new_cmd->add_option("-o,--output", output, "Plan file to write")->required();

  auto* tree_cmd = app.add_subcommand("tree", "Print the outline with ids, kinds and stale markers");
  tree_cmd->add_option("file", file)->required();

  auto* elaborate_cmd = app.add_subcommand("elaborate", "Suggest key aspects and accept some");
  elaborate_cmd->add_option("file", file)->required();
  elaborate_cmd->add_option("--node", node)->required();
  elaborate_cmd->add_option("--pick", pick, "1-based indices, e.g. 1,3");

  auto* points_cmd = app.add_subcommand("points", "Suggest discussion points per aspect");
  points_cmd->add_option("file", file)->required();
  points_cmd->add_option("--node", node)->required();
  points_cmd->add_option("--aspects", aspects, "Aspects separated by ';'")->required();
  points_cmd->add_option("--pick", pick, "1-based indices over all listed points");

  auto* sparks_cmd = app.add_subcommand("sparks", "Counterarguments, fallacies or evidence");
  sparks_cmd->add_option("file", file)->required();
  sparks_cmd->add_option("--node", node)->required();
  sparks_cmd->add_option("--kind", kind)
      ->required()
      ->check(CLI::IsMember({"counter", "fallacy", "evidence"}));
  sparks_cmd->add_option("--pick", pick);

  auto* draft_cmd = app.add_subcommand("draft", "Draft one node, or redraft every node");
  draft_cmd->add_option("file", file)->required();
  draft_cmd->add_option("--node", node_opt);

  auto* generate_cmd = app.add_subcommand("generate", "Draft every stale or undrafted node");
  generate_cmd->add_option("file", file)->required();

  auto* lazy_cmd = app.add_subcommand("lazy", "Turn lazy update mode on or off");
  lazy_cmd->add_option("file", file)->required();
  lazy_cmd->add_option("state", state)->required()->check(CLI::IsMember({"on", "off"}));

  auto* refine_cmd = app.add_subcommand("refine", "Revise a draft following an instruction");
  refine_cmd->add_option("file", file)->required();
  refine_cmd->add_option("--node", node)->required();
  refine_cmd->add_option("-m,--message", message)->required();

  auto* alt_cmd = app.add_subcommand("alternatives", "Offer other drafts for a node");
  alt_cmd->add_option("file", file)->required();
  alt_cmd->add_option("--node", node)->required();
  alt_cmd->add_option("-n,--count", count)->check(CLI::Range(1, kMaxAlternatives));
  alt_cmd->add_option("--pick", pick, "Index of the candidate to keep");

  auto* export_cmd = app.add_subcommand("export", "Print the outline or the draft document");
  export_cmd->add_option("file", file)->required();
  export_cmd->add_option("--format", format)->required()->check(CLI::IsMember({"md", "txt"}));

  auto* add_cmd = app.add_subcommand("add", "Add a child node");
  add_cmd->add_option("file", file)->required();
  add_cmd->add_option("--parent", parent)->required();
  add_cmd->add_option("--edge", edge)->required();
  add_cmd->add_option("text", text)->required();

  auto* edit_cmd = app.add_subcommand("edit", "Change a node's goal text");
  edit_cmd->add_option("file", file)->required();
  edit_cmd->add_option("--node", node)->required();
  edit_cmd->add_option("text", text)->required();

  auto* edge_cmd = app.add_subcommand("set-edge", "Change the relation to the parent");
  edge_cmd->add_option("file", file)->required();
  edge_cmd->add_option("--node", node)->required();
  edge_cmd->add_option("--edge", edge)->required();

  auto* move_cmd = app.add_subcommand("move", "Re-parent a subtree");
  move_cmd->add_option("file", file)->required();
  move_cmd->add_option("--node", node)->required();
  move_cmd->add_option("--parent", parent)->required();
  move_cmd->add_option("--edge", edge)->required();

  auto* reorder_cmd = app.add_subcommand("reorder", "Move a node among its siblings");
  reorder_cmd->add_option("file", file)->required();
  reorder_cmd->add_option("--node", node)->required();
  reorder_cmd->add_option("--to", to_index)->required();

  auto* remove_cmd = app.add_subcommand("remove", "Delete a node and its subtree");
  remove_cmd->add_option("file", file)->required();
  remove_cmd->add_option("--node", node)->required();

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--store", store_dir, "Directory of plan files");

  std::vector<std::string> argv_storage{"argplan"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out_, err_);
    return code == 0 ? kExitOk : kExitUsage;
  }

  provider_ = std::make_shared<DeferredProvider>(options_);
  std::optional<PlanSession> session;
  try {
    if (new_cmd->parsed()) {
      auto plan = new_plan(text);
      save_plan(plan, output);
      out_ << plan.id << '\n';
    } else if (tree_cmd->parsed()) {
      print_tree(load_plan(file));
    } else if (export_cmd->parsed()) {
      const auto plan = load_plan(file);
      out_ << (format == "md" ? export_markdown(plan) : export_text(plan));
    } else if (serve_cmd->parsed()) {
      Service service({store_dir, provider_, {}, std::chrono::minutes(30)});
      const int bound = service.bind(host, port);
      err_ << "listening on http://" << host << ':' << bound << std::endl;
      service.run();
    } else {
      session.emplace(open(file));
      auto& s = *session;
      if (elaborate_cmd->parsed()) {
        auto list = elaborate_key_aspects(s.plan(), node, s.provider());
        print_list(list.items);
        std::vector<std::string> chosen;
        for (auto i : select(pick, list.items.size())) chosen.push_back(list.items[i]);
        if (!chosen.empty()) {
          touched(s);
          auto ids = s.mutate([&](ArgumentPlan& p) {
            return accept_suggestions(p, node, EdgeKind::FeaturedBy, chosen);
          });
          for (const auto& id : ids) out_ << "added " << id << '\n';
          report_generated(s);
        }
      } else if (points_cmd->parsed()) {
        std::vector<std::string> aspect_list;
        std::stringstream stream(aspects);
        for (std::string a; std::getline(stream, a, ';');) {
          if (!is_blank(a)) aspect_list.push_back(a);
        }
        auto result = discussion_points(s.plan(), node, aspect_list, s.provider());
        for (const auto& f : result.failures) err_ << "no points for \"" << f.aspect << "\": " << f.message << '\n';
        std::vector<std::pair<std::string, std::string>> flat;  // aspect, point
        for (const auto& [aspect, list] : result.by_aspect) {
          out_ << aspect << ":\n";
          print_list(list.items, flat.size() + 1);
          for (const auto& item : list.items) flat.emplace_back(aspect, item);
        }
        const auto picks = select(pick, flat.size());
        if (!picks.empty()) {
          touched(s);
          auto ids = s.mutate([&](ArgumentPlan& p) {
            // Points hang under the aspect node of the same text, created if absent.
            std::vector<NodeId> created;
            for (auto i : picks) {
              const auto& [aspect, point] = flat[i];
              NodeId aspect_id;
              for (const auto& child : node_at(p, node).children) {
                if (child.kind == NodeKind::KeyAspect && child.prompt_text == aspect) aspect_id = child.id;
              }
              if (aspect_id.empty()) {
                aspect_id = add_child(p, node, EdgeKind::FeaturedBy, aspect);
                created.push_back(aspect_id);
              }
              created.push_back(add_child(p, aspect_id, EdgeKind::ElaboratedBy, point));
            }
            return created;
          });
          for (const auto& id : ids) out_ << "added " << id << '\n';
          report_generated(s);
        }
      } else if (sparks_cmd->parsed()) {
        if (kind == "counter") {
          auto list = counterargument_sparks(s.plan(), node, s.provider());
          print_list(list.items);
          std::vector<std::string> chosen;
          for (auto i : select(pick, list.items.size())) chosen.push_back(list.items[i]);
          if (!chosen.empty()) {
            touched(s);
            auto ids = s.mutate([&](ArgumentPlan& p) {
              return accept_suggestions(p, node, EdgeKind::AttackedBy, chosen);
            });
            for (const auto& id : ids) out_ << "added " << id << '\n';
            report_generated(s);
          }
        } else if (kind == "evidence") {
          auto list = evidence_sparks(s.plan(), node, s.provider());
          std::vector<std::string> lines;
          for (const auto& e : list) lines.push_back(evidence_prompt_text(e));
          print_list(lines);
          std::vector<EvidenceSuggestion> chosen;
          for (auto i : select(pick, list.size())) chosen.push_back(list[i]);
          if (!chosen.empty()) {
            touched(s);
            auto ids = s.mutate([&](ArgumentPlan& p) { return accept_evidence(p, node, chosen); });
            for (const auto& id : ids) out_ << "added " << id << '\n';
            report_generated(s);
          }
        } else {
          auto list = fallacy_sparks(s.plan(), node, s.provider());
          std::vector<std::string> lines;
          for (const auto& f : list) lines.push_back(f.name + ": " + f.explanation);
          print_list(lines);
          std::vector<FallacySuggestion> chosen;
          for (auto i : select(pick, list.size())) chosen.push_back(list[i]);
          if (!chosen.empty()) {
            auto revised = fix_fallacies(s.plan(), node, chosen, s.provider());
            touched(s);
            // The root has no generated draft; its revision becomes its text.
            s.mutate([&](ArgumentPlan& p) {
              if (parent_of(p, node) == nullptr) {
                edit_prompt_text(p, node, revised);
              } else {
                replace_draft(p, node, revised);
              }
            });
            out_ << revised << '\n';
            report_generated(s);
          }
        }
      } else if (draft_cmd->parsed()) {
        touched(s);
        if (node_opt) {
          out_ << generate_draft(s.plan(), *node_opt, s.provider()) << '\n';
        } else {
          for (const auto& id : document_order(s.plan())) {
            if (id == s.plan().root.id) continue;
            generate_draft(s.plan(), id, s.provider());
            out_ << "drafted " << id << '\n';
          }
        }
      } else if (generate_cmd->parsed()) {
        touched(s);
        s.generate();
        report_generated(s);
      } else if (lazy_cmd->parsed()) {
        touched(s);
        s.set_lazy(state == "on");
        report_generated(s);
      } else if (refine_cmd->parsed()) {
        touched(s);
        out_ << refine(s.plan(), node, message, s.provider()) << '\n';
      } else if (alt_cmd->parsed()) {
        auto candidates = alternatives(s.plan(), node, count, s.provider());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          out_ << (i + 1) << ". " << candidates[i] << "\n\n";
        }
        auto picks = select(pick, candidates.size());
        if (picks.size() > 1) throw UsageError("pick at most one alternative");
        if (!picks.empty()) {
          touched(s);
          replace_draft(s.plan(), node, candidates[picks.front()]);
        }
      } else if (add_cmd->parsed()) {
        const auto e = parse_edge_or_usage(edge);
        touched(s);
        out_ << s.mutate([&](ArgumentPlan& p) { return add_child(p, parent, e, text); }) << '\n';
        report_generated(s);
      } else if (edit_cmd->parsed()) {
        touched(s);
        s.mutate([&](ArgumentPlan& p) { edit_prompt_text(p, node, text); });
        report_generated(s);
      } else if (edge_cmd->parsed()) {
        const auto e = parse_edge_or_usage(edge);
        touched(s);
        s.mutate([&](ArgumentPlan& p) { set_edge_kind(p, node, e); });
        report_generated(s);
      } else if (move_cmd->parsed()) {
        const auto e = parse_edge_or_usage(edge);
        touched(s);
        s.mutate([&](ArgumentPlan& p) { move_node(p, node, parent, e); });
        report_generated(s);
      } else if (reorder_cmd->parsed()) {
        touched(s);
        const PlanNode* up = parent_of(s.plan(), node);
        if (up == nullptr) throw Error(ErrorCode::RootEdgeForbidden, "the root has no siblings");
        const NodeId parent_id = up->id;
        reorder_child(s.plan(), parent_id, child_index(s.plan(), node), to_index);
      } else if (remove_cmd->parsed()) {
        touched(s);
        out_ << "removed " << remove_subtree(s.plan(), node) << " nodes\n";
      }
      if (pending_ != nullptr) save(s);
    }
    provider_->flush();
    return kExitOk;
  } catch (const UsageError& e) {
    err_ << "argplan: " << e.what() << '\n';
    provider_->flush();
    return kExitUsage;
  } catch (const Error& e) {
    // Work finished before a failure (a mutation, drafts already stored) is kept.
    if (pending_ != nullptr && session) {
      try {
        save(*session);
      } catch (const Error& save_error) {
        err_ << "argplan: " << save_error.what() << '\n';
      }
    }
    try {
      provider_->flush();
    } catch (const Error& flush_error) {
      err_ << "argplan: " << flush_error.what() << '\n';
    }
    err_ << "argplan: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return e.category() == ErrorCategory::Provider ? kExitProvider : kExitEngine;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  return Cli(in, out, err).run(args);
}

}  // namespace argplan
