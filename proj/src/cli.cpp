#include "evident/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "evident/algebra.hpp"
#include "evident/frontend.hpp"
#include "evident/workspace.hpp"

namespace fs = std::filesystem;

namespace evident::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    if (end > start) out.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

Json parse_json_arg(const std::string& text, const char* flag) {
  try {
    return Json::parse(text);
  } catch (const Json::exception&) {
    throw UsageError(std::string(flag) + " is not valid JSON");
  }
}

// key=value; value is JSON when it parses as a number, boolean, list or
// map, else a plain string.
void apply_set(Json& payload, const std::vector<std::string>& sets) {
  for (const auto& item : sets) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    std::string raw = item.substr(eq + 1);
    Json value = raw;
    try {
      Json parsed = Json::parse(raw);
      if (!parsed.is_string() && !parsed.is_null()) value = parsed;
    } catch (const Json::exception&) {
    }
    payload[key] = value;
  }
}

struct ContainerFlags {
  std::string payload;
  std::vector<std::string> sets;
  std::string period;
  std::vector<std::string> labels;

  void attach(CLI::App* cmd) {
    cmd->add_option("--payload", payload, "Payload as a JSON map");
    cmd->add_option("--set", sets, "Payload field key=value (repeatable)");
    cmd->add_option("--period", period, "Project period tag");
    cmd->add_option("--label", labels, "Label (repeatable)");
  }

  Json base_payload() const {
    Json p = payload.empty() ? Json::object() : parse_json_arg(payload, "--payload");
    if (!p.is_object()) throw UsageError("--payload must be a JSON map");
    return p;
  }

  std::optional<std::string> period_tag() const {
    return period.empty() ? std::nullopt : std::optional<std::string>(period);
  }
};

enum class Format { Table, Csv, Canonical, Markdown };

Format parse_format(const std::string& text, std::initializer_list<Format> allowed) {
  static const std::map<std::string, Format> kNames = {{"table", Format::Table},
                                                       {"csv", Format::Csv},
                                                       {"canonical", Format::Canonical},
                                                       {"markdown", Format::Markdown}};
  auto it = kNames.find(text);
  if (it == kNames.end() || std::find(allowed.begin(), allowed.end(), it->second) == allowed.end())
    throw UsageError("unsupported --format '" + text + "'");
  return it->second;
}

std::set<ContainerId> resolve_all(const Snapshot& s, const std::string& list, ErrorCode not_found) {
  std::set<ContainerId> out;
  for (const auto& item : split(list, ',')) out.insert(resolve_id(s, item, not_found));
  return out;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err, const Environment& env)
      : out_(out), err_(err), env_(env) {}

  int run(const std::vector<std::string>& args);

 private:
  fs::path workspace_dir() const {
    if (!workspace_flag_.empty()) return env_.cwd / workspace_flag_;
    if (env_.workspace_override) return env_.cwd / *env_.workspace_override;
    return env_.cwd;
  }
  std::int64_t now() const { return env_.clock ? env_.clock() : now_seconds(); }
  Workspace open() const { return Workspace::open(workspace_dir()); }
  Snapshot source_snapshot(const std::string& path) const {
    if (path.empty() || path == ".") return open().snapshot();
    return load_snapshot(env_.cwd / path);
  }

  void print_snapshot_result(const Snapshot& s);
  void add_container(ContainerKind kind, Json payload, const ContainerFlags& flags);

  std::ostream& out_;
  std::ostream& err_;
  const Environment& env_;

  std::string workspace_flag_;
  std::string format_ = "table";
  std::string out_path_;
};

void Runner::add_container(ContainerKind kind, Json payload, const ContainerFlags& flags) {
  Workspace ws = open();
  Container c = make_container(kind, std::move(payload), flags.period_tag(), flags.labels, now());
  ws.append(EventKind::AddContainer, add_container_payload(c), now());
  out_ << c.id.str() << "\n";
}

void Runner::print_snapshot_result(const Snapshot& s) {
  if (!out_path_.empty()) {
    std::ofstream f(env_.cwd / out_path_, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + out_path_);
    f << serialize_snapshot(s);
  }
  switch (parse_format(format_, {Format::Table, Format::Csv, Format::Canonical})) {
    case Format::Table: out_ << grid_table(s, grid_view(s)); break;
    case Format::Csv: out_ << grid_csv(s, grid_view(s)); break;
    default: out_ << serialize_snapshot(s); break;
  }
}

int Runner::run(const std::vector<std::string>& args) {
  CLI::App app{"evident: knowledge base of Observations, Hypotheses and Tests", "evident"};
  app.require_subcommand(1);
  app.add_option("-w,--workspace", workspace_flag_,
                 "Workspace directory (default: $EVIDENT_WORKSPACE, else the current directory)");

  auto* init = app.add_subcommand("init", "Create an empty workspace log");

  ContainerFlags obs_flags;
  std::string dataset, digest;
  auto* add_obs = app.add_subcommand("add-observation", "Register an Observation");
  obs_flags.attach(add_obs);
  add_obs->add_option("--dataset", dataset, "Dataset name");
  add_obs->add_option("--digest", digest, "Digest of the external data");

  ContainerFlags hyp_flags;
  std::string hyp_text;
  auto* add_hyp = app.add_subcommand("add-hypothesis", "Register a Hypothesis");
  hyp_flags.attach(add_hyp);
  add_hyp->add_option("--text", hyp_text, "Hypothesis text (model + configuration)");

  ContainerFlags test_flags;
  std::string method, metric, strategy, outcome;
  std::optional<double> confidence;
  auto* add_test = app.add_subcommand("add-test", "Register a Test");
  test_flags.attach(add_test);
  add_test->add_option("--method", method, "Evaluation procedure");
  add_test->add_option("--metric", metric, "Evaluation metric, e.g. AUC");
  add_test->add_option("--strategy", strategy, "Observation usage strategy");
  add_test->add_option("--outcome", outcome, "proved|disproved|overlooked|pending");
  add_test->add_option("--confidence", confidence, "Confidence in [0,1]");

  std::string from, to, edge_kind;
  auto* link = app.add_subcommand("link", "Associate a container with a Test");
  link->add_option("--from", from, "Source id")->required();
  link->add_option("--to", to, "Target Test id")->required();
  link->add_option("--kind", edge_kind, "hypothesis|observation|premise")->required();

  std::string test_ref, hyp_ref;
  auto* set_winner = app.add_subcommand("set-winner", "Designate the Hypothesis owning an abduction row");
  set_winner->add_option("--test", test_ref, "Test id")->required();
  set_winner->add_option("--hypothesis", hyp_ref, "Hypothesis id")->required();

  std::string promote_obs, promote_outcome, obs_payload;
  std::optional<double> promote_confidence;
  auto* promote = app.add_subcommand("promote", "Attach an Observation to a Deduction Test");
  promote->add_option("--test", test_ref, "Deduction Test id")->required();
  promote->add_option("--observation", promote_obs, "Existing Observation id");
  promote->add_option("--obs-payload", obs_payload, "Register a new Observation with this JSON payload");
  promote->add_option("--outcome", promote_outcome, "proved|disproved|overlooked")->required();
  promote->add_option("--confidence", promote_confidence, "Confidence in [0,1]");

  bool permuted = false;
  auto* grid = app.add_subcommand("grid", "Show the Hypothesis x Observation grid");
  grid->add_option("--format", format_, "table|csv|canonical");
  grid->add_flag("--permute", permuted, "Swap rows and columns");

  auto* status = app.add_subcommand("status", "Summarize a Hypothesis");
  status->add_option("hypothesis,--hypothesis", hyp_ref, "Hypothesis id")->required();
  status->add_option("--format", format_, "table|canonical");

  auto* backlog_cmd = app.add_subcommand("backlog", "List TBD cells and pending Deductions");
  backlog_cmd->add_option("--format", format_, "table|canonical");

  auto* report = app.add_subcommand("report", "Generate a Knowledge report");
  report->add_option("test,--test", test_ref, "Test id")->required();
  report->add_option("--format", format_, "markdown|canonical");

  auto* export_cmd = app.add_subcommand("export", "Write the canonical snapshot (.ekb)");
  export_cmd->add_option("--out", out_path_, "Output file (default: stdout)");

  std::vector<std::string> with;
  auto* join_cmd = app.add_subcommand("join", "Join this EKB with others");
  join_cmd->add_option("--with", with, "Workspace dir, .ekblog or .ekb (repeatable)")->required();

  std::string rows, cols, source;
  auto* restrict_cmd = app.add_subcommand("restrict", "Select rows (Hypotheses)");
  restrict_cmd->add_option("--rows", rows, "Comma-separated Hypothesis ids")->required();

  auto* project_cmd = app.add_subcommand("project", "Select columns (Observations)");
  project_cmd->add_option("--cols", cols, "Comma-separated Observation ids")->required();

  std::vector<std::string> parts;
  auto* compose_cmd = app.add_subcommand("compose", "Merge selected rows/columns of several EKBs");
  compose_cmd->add_option("--part", parts, "PATH[;rows=ID,..][;cols=ID,..] (repeatable)");

  for (auto* cmd : {join_cmd, restrict_cmd, project_cmd, compose_cmd}) {
    cmd->add_option("--format", format_, "table|csv|canonical");
    cmd->add_option("--out", out_path_, "Also write the result snapshot to this file");
  }
  for (auto* cmd : {restrict_cmd, project_cmd})
    cmd->add_option("--from", source, "Workspace dir, .ekblog or .ekb (default: workspace)");

  auto* verify = app.add_subcommand("verify", "Check the log's hash chain");
  verify->add_option("--format", format_, "table|canonical");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out_, err_);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (init->parsed()) {
      Workspace::init(workspace_dir());
      out_ << "initialized " << (workspace_dir() / kLogFileName).string() << "\n";
    } else if (add_obs->parsed()) {
      Json p = obs_flags.base_payload();
      if (!dataset.empty()) p["dataset"] = dataset;
      if (!digest.empty()) p["digest"] = digest;
      apply_set(p, obs_flags.sets);
      add_container(ContainerKind::Observation, std::move(p), obs_flags);
    } else if (add_hyp->parsed()) {
      Json p = hyp_flags.base_payload();
      if (!hyp_text.empty()) p["text"] = hyp_text;
      apply_set(p, hyp_flags.sets);
      add_container(ContainerKind::Hypothesis, std::move(p), hyp_flags);
    } else if (add_test->parsed()) {
      Json p = test_flags.base_payload();
      if (!method.empty()) p["method"] = method;
      if (!metric.empty()) p["metric"] = metric;
      if (!strategy.empty()) p["strategy"] = strategy;
      if (!outcome.empty()) p["outcome"] = outcome;
      else if (!p.contains("outcome")) p["outcome"] = "pending";
      if (confidence) p["confidence"] = *confidence;
      apply_set(p, test_flags.sets);
      add_container(ContainerKind::Test, std::move(p), test_flags);
    } else if (link->parsed()) {
      auto kind = parse_edge_kind(edge_kind);
      if (!kind) throw UsageError("--kind must be hypothesis, observation or premise");
      Workspace ws = open();
      const Snapshot& s = ws.snapshot();
      Association a{resolve_id(s, from), resolve_id(s, to), *kind};
      ws.append(EventKind::AddAssociation, add_association_payload(a), now());
      out_ << a.source.str() << " -> " << a.target.str() << " (" << to_string(a.kind) << ")\n";
    } else if (set_winner->parsed()) {
      Workspace ws = open();
      const Snapshot& s = ws.snapshot();
      auto t = resolve_id(s, test_ref);
      auto h = resolve_id(s, hyp_ref);
      ws.append(EventKind::SetWinner, set_winner_payload(t, h), now());
      out_ << "winner of " << t.str() << " is " << h.str() << "\n";
    } else if (promote->parsed()) {
      auto o = parse_outcome(promote_outcome);
      if (!o) throw UsageError("--outcome must be proved, disproved or overlooked");
      if (promote_obs.empty() == obs_payload.empty())
        throw UsageError("give exactly one of --observation and --obs-payload");
      Workspace ws = open();
      const Snapshot& s = ws.snapshot();
      auto t = resolve_id(s, test_ref);
      std::optional<Container> inline_obs;
      ContainerId obs;
      if (!obs_payload.empty()) {
        inline_obs = make_container(ContainerKind::Observation,
                                    parse_json_arg(obs_payload, "--obs-payload"), std::nullopt, {},
                                    now());
        obs = inline_obs->id;
      } else {
        obs = resolve_id(s, promote_obs);
      }
      Container original = s.at(t);  // `s` is replaced by append()
      std::int64_t ts = now();
      ws.append(EventKind::AttachObservation,
                attach_observation_payload(t, obs, *o, promote_confidence, inline_obs), ts);
      Container successor = promoted_successor(original, *o, promote_confidence, ts);
      out_ << successor.id.str() << "\n";
    } else if (grid->parsed()) {
      Workspace ws = open();
      const Snapshot& s = ws.snapshot();
      GridView g = grid_view(s);
      if (permuted) g = permute(g);
      switch (parse_format(format_, {Format::Table, Format::Csv, Format::Canonical})) {
        case Format::Table: out_ << grid_table(s, g); break;
        case Format::Csv: out_ << grid_csv(s, g); break;
        default: out_ << canonical_grid(s, permuted); break;
      }
    } else if (status->parsed()) {
      Workspace ws = open();
      const Snapshot& s = ws.snapshot();
      auto h = resolve_id(s, hyp_ref);
      if (parse_format(format_, {Format::Table, Format::Canonical}) == Format::Canonical) {
        out_ << canonical_status(s, h);
      } else {
        StatusSummary st = hypothesis_status(s, h);
        out_ << h.str() << ": " << to_string(st.summary) << "\n";
        for (const auto& [test, o] : st.per_test) out_ << "  " << test.str() << " " << to_string(o) << "\n";
      }
    } else if (backlog_cmd->parsed()) {
      Workspace ws = open();
      const Snapshot& s = ws.snapshot();
      if (parse_format(format_, {Format::Table, Format::Canonical}) == Format::Canonical) {
        out_ << canonical_backlog(s);
      } else {
        auto entries = backlog(s);
        if (entries.empty()) out_ << "(empty)\n";
        for (const auto& e : entries) {
          out_ << (e.period_tag.empty() ? "-" : e.period_tag) << "  "
               << (e.kind == BacklogEntry::Kind::TbdCell ? "TBD    " : "PENDING") << "  "
               << short_id(e.row) << "  "
               << (ContainerId::well_formed(e.column) ? short_id(ContainerId::parse(e.column)) : e.column);
          if (e.test) out_ << "  " << short_id(*e.test);
          out_ << "\n";
        }
      }
    } else if (report->parsed()) {
      Workspace ws = open();
      const Snapshot& s = ws.snapshot();
      auto t = resolve_id(s, test_ref);
      if (format_ == "table") format_ = "markdown";
      if (parse_format(format_, {Format::Markdown, Format::Canonical}) == Format::Canonical)
        out_ << canonical_report(s, t);
      else
        out_ << report_markdown(s, knowledge_report(s, t));
    } else if (export_cmd->parsed()) {
      Workspace ws = open();
      std::string doc = serialize_snapshot(ws.snapshot());
      if (out_path_.empty()) {
        out_ << doc;
      } else {
        std::ofstream f(env_.cwd / out_path_, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::IoError, "cannot write " + out_path_);
        f << doc;
      }
    } else if (join_cmd->parsed()) {
      Snapshot acc = open().snapshot();
      for (const auto& other : with) acc = join(acc, load_snapshot(env_.cwd / other));
      print_snapshot_result(acc);
    } else if (restrict_cmd->parsed()) {
      Snapshot s = source_snapshot(source);
      print_snapshot_result(restrict(s, is_selectable(s).selectable
                                            ? resolve_all(s, rows, ErrorCode::UnknownHypothesis)
                                            : std::set<ContainerId>{}));
    } else if (project_cmd->parsed()) {
      Snapshot s = source_snapshot(source);
      print_snapshot_result(project(s, is_selectable(s).selectable
                                           ? resolve_all(s, cols, ErrorCode::UnknownObservation)
                                           : std::set<ContainerId>{}));
    } else if (compose_cmd->parsed()) {
      std::vector<ComposePart> selected;
      for (const auto& raw : parts) {
        auto fields = split(raw, ';');
        if (fields.empty()) throw UsageError("empty --part");
        ComposePart part;
        part.snapshot = source_snapshot(fields.front());
        bool selectable = is_selectable(part.snapshot).selectable;
        for (std::size_t i = 1; i < fields.size(); ++i) {
          const auto& f = fields[i];
          if (f.rfind("rows=", 0) == 0) {
            part.rows = selectable ? resolve_all(part.snapshot, f.substr(5), ErrorCode::UnknownHypothesis)
                                   : std::set<ContainerId>{};
          } else if (f.rfind("cols=", 0) == 0) {
            part.columns = selectable ? resolve_all(part.snapshot, f.substr(5), ErrorCode::UnknownObservation)
                                      : std::set<ContainerId>{};
          } else {
            throw UsageError("--part field must be rows=... or cols=..., got '" + f + "'");
          }
        }
        selected.push_back(std::move(part));
      }
      print_snapshot_result(compose(selected));
    } else if (verify->parsed()) {
      auto fmt = parse_format(format_, {Format::Table, Format::Canonical});
      fs::path log = workspace_dir() / kLogFileName;
      if (!fs::is_regular_file(log))
        throw Error(ErrorCode::NoWorkspace, "no " + std::string(kLogFileName) + " in " + workspace_dir().string());
      VerificationReport r = verify_log_bytes(read_file(log));
      if (fmt == Format::Canonical) {
        out_ << canonical_verify(r);
      } else if (r.ok) {
        out_ << "ok: " << r.events << " events verified\n";
      } else {
        out_ << "corrupt: first bad seq " << *r.first_bad_seq << " (" << r.reason << ")\n";
      }
      if (!r.ok) {
        err_ << "error: ChainCorrupt: chain breaks at seq " << *r.first_bad_seq << "\n";
        return kExitDomain;
      }
    }
  } catch (const UsageError& e) {
    err_ << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err_ << "error: " << e.name() << ": " << e.message() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                const Environment& env) {
  Runner runner(out, err, env);
  return runner.run(args);
}

}  // namespace evident::cli
