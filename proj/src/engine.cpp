#include "evident/engine.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace evident {

std::string GridCoordinate::column_key() const {
  return column ? column->str() : std::string(kPending);
}

GridCoordinate place_test(const Snapshot& snapshot, const ContainerId& test) {
  KnowledgeKind kind = classify_test(snapshot, test);
  switch (kind) {
    case KnowledgeKind::Induction:
      return {snapshot.sources_into(test, EdgeKind::Hypothesis).front(),
              snapshot.sources_into(test, EdgeKind::Observation).front()};
    case KnowledgeKind::Abduction:
      return {*snapshot.winner(test),
              snapshot.sources_into(test, EdgeKind::Observation).front()};
    case KnowledgeKind::Deduction:
      return {snapshot.sources_into(test, EdgeKind::Hypothesis).front(), std::nullopt};
    case KnowledgeKind::Incomplete:
      break;
  }
  throw Error(ErrorCode::Unclassifiable, "Test is not yet a Knowledge", {test.str()});
}

const std::vector<ContainerId>& GridView::cell(const std::string& row,
                                               const std::string& column) const {
  static const std::vector<ContainerId> kEmpty;
  auto it = cells.find({row, column});
  return it == cells.end() ? kEmpty : it->second;
}

std::vector<ContainerId> placed_tests(const Snapshot& snapshot) {
  auto superseded = snapshot.superseded();
  std::vector<ContainerId> out;
  for (auto& test : snapshot.ordered(ContainerKind::Test)) {
    if (superseded.count(test)) continue;
    if (classify_test(snapshot, test) == KnowledgeKind::Incomplete) continue;
    out.push_back(std::move(test));
  }
  return out;
}

GridView grid_view(const Snapshot& snapshot) {
  GridView grid;
  for (const auto& h : snapshot.ordered(ContainerKind::Hypothesis)) grid.rows.push_back(h.str());
  for (const auto& o : snapshot.ordered(ContainerKind::Observation))
    grid.columns.push_back(o.str());
  grid.columns.emplace_back(kPending);

  for (const auto& test : placed_tests(snapshot)) {
    GridCoordinate at = place_test(snapshot, test);
    grid.cells[{at.row.str(), at.column_key()}].push_back(test);
  }
  for (const auto& row : grid.rows)
    for (const auto& col : grid.columns)
      if (col != kPending && !grid.cells.count({row, col})) grid.tbd.insert({row, col});
  return grid;
}

// ---------------------------------------------------------------------------
// Promotion
// ---------------------------------------------------------------------------

Container promoted_successor(const Container& original, Outcome outcome,
                             std::optional<double> confidence,
                             std::int64_t created_at) {
  Json payload = original.payload;
  payload["outcome"] = std::string(to_string(outcome));
  if (confidence) payload["confidence"] = *confidence;
  std::vector<std::string> labels;
  for (const auto& l : original.labels)
    if (l.rfind(kSupersedesPrefix, 0) != 0) labels.push_back(l);
  labels.push_back(std::string(kSupersedesPrefix) + original.id.str());
  return make_container(ContainerKind::Test, std::move(payload), original.period_tag,
                        std::move(labels), created_at);
}

Snapshot attach_observation(const Snapshot& snapshot, const ContainerId& test,
                            const ContainerId& observation, Outcome outcome,
                            std::optional<double> confidence, std::int64_t created_at) {
  const Container& original = snapshot.at(test);
  if (!original.is_test())
    throw Error(ErrorCode::NotATest, "only Tests can be promoted", {test.str()});
  if (outcome == Outcome::Pending)
    throw Error(ErrorCode::InvalidOutcome,
                "promotion outcome must be proved, disproved or overlooked");
  if (!snapshot.sources_into(test, EdgeKind::Observation).empty())
    throw Error(ErrorCode::SingleObservationViolation, "Test already has an observation",
                {test.str()});
  if (classify_test(snapshot, test) != KnowledgeKind::Deduction)
    throw Error(ErrorCode::NotDeduction, "only Deduction Tests can be promoted", {test.str()});
  const Container& obs = snapshot.at(observation);
  if (obs.kind != ContainerKind::Observation)
    throw Error(ErrorCode::KindMismatch, "promotion needs an Observation", {observation.str()});

  Container successor = promoted_successor(original, outcome, confidence, created_at);
  ContainerId sid = successor.id;
  Snapshot next = snapshot;
  next.insert(std::move(successor));
  for (const auto& h : snapshot.sources_into(test, EdgeKind::Hypothesis))
    next.insert(Association{h, sid, EdgeKind::Hypothesis});
  for (const auto& p : snapshot.targets_from(test, EdgeKind::Premise))
    next.insert(Association{sid, p, EdgeKind::Premise});
  next.insert(make_association(next, observation, sid, EdgeKind::Observation));
  return next;
}

// ---------------------------------------------------------------------------
// Status
// ---------------------------------------------------------------------------

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Proved: return "proved";
    case Status::Disproved: return "disproved";
    case Status::Overlooked: return "overlooked";
    case Status::Contested: return "contested";
    case Status::Tbd: return "TBD";
  }
  return "?";
}

Status summarize(const std::vector<Outcome>& outcomes) {
  if (outcomes.empty()) return Status::Tbd;
  bool proved = std::count(outcomes.begin(), outcomes.end(), Outcome::Proved) > 0;
  bool disproved = std::count(outcomes.begin(), outcomes.end(), Outcome::Disproved) > 0;
  if (proved && disproved) return Status::Contested;
  if (proved) return Status::Proved;
  if (disproved) return Status::Disproved;
  return Status::Overlooked;
}

StatusSummary hypothesis_status(const Snapshot& snapshot, const ContainerId& hypothesis) {
  const Container& h = snapshot.at(hypothesis);
  if (h.kind != ContainerKind::Hypothesis)
    throw Error(ErrorCode::NotAHypothesis, hypothesis.str() + " is a " +
                                               std::string(to_string(h.kind)),
                {hypothesis.str()});
  StatusSummary out;
  out.hypothesis = hypothesis;
  std::vector<Outcome> outcomes;
  for (const auto& test : placed_tests(snapshot)) {
    if (place_test(snapshot, test).row != hypothesis) continue;
    Outcome o = snapshot.at(test).outcome();
    out.per_test.emplace(test, o);
    outcomes.push_back(o);
  }
  out.summary = summarize(outcomes);
  return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string short_id(const ContainerId& id) {
  return std::string(id.hex().substr(0, 12));
}

std::string display_text(const Container& c) {
  for (const char* key : {"text", "name", "dataset", "method"})
    if (auto v = c.text_field(key)) return *v;
  return canonical_dump(c.payload);
}

namespace {

std::vector<ContainerId> by_grid_order(const Snapshot& s, std::vector<ContainerId> ids) {
  std::sort(ids.begin(), ids.end(), [&](const ContainerId& a, const ContainerId& b) {
    return std::pair(s.ordinal(a).value_or(0), a) < std::pair(s.ordinal(b).value_or(0), b);
  });
  return ids;
}

std::string observation_summary(const Container& obs) {
  auto dataset = obs.text_field("dataset");
  auto digest = obs.text_field("digest");
  if (dataset && digest) return *dataset + " (" + *digest + ")";
  if (digest) return *digest;
  return display_text(obs);
}

std::string number_text(double v) { return canonical_dump(normalize_numbers(Json(v))); }

}  // namespace

KnowledgeReport knowledge_report(const Snapshot& snapshot, const ContainerId& test) {
  KnowledgeReport r;
  r.test = test;
  r.placement = place_test(snapshot, test);
  r.kind = classify_test(snapshot, test);
  const Container& t = snapshot.at(test);
  r.hypotheses = by_grid_order(snapshot, snapshot.sources_into(test, EdgeKind::Hypothesis));
  for (const auto& h : r.hypotheses) r.hypothesis_texts.push_back(display_text(snapshot.at(h)));
  r.winner = snapshot.winner(test);
  auto obs = snapshot.sources_into(test, EdgeKind::Observation);
  if (!obs.empty()) {
    r.observation = obs.front();
    r.observation_summary = observation_summary(snapshot.at(obs.front()));
  }
  r.method = t.text_field("method").value_or("");
  r.metric = t.text_field("metric");
  r.strategy = t.text_field("strategy");
  r.outcome = t.outcome();
  r.confidence = t.confidence();
  r.period_tag = t.period_tag;
  r.supersedes = t.supersedes();

  std::set<ContainerId> seen{test};
  std::deque<ContainerId> queue{test};
  while (!queue.empty()) {
    ContainerId cur = queue.front();
    queue.pop_front();
    for (auto& p : snapshot.targets_from(cur, EdgeKind::Premise)) {
      if (!seen.insert(p).second) continue;
      r.premise_chain.push_back(p);
      queue.push_back(std::move(p));
    }
  }
  return r;
}

Json report_json(const Snapshot& snapshot, const KnowledgeReport& r) {
  Json doc = Json::object();
  doc["test"] = r.test.str();
  doc["kind"] = std::string(to_string(r.kind));
  doc["row"] = r.placement.row.str();
  doc["column"] = r.placement.column_key();
  Json hyps = Json::array();
  for (std::size_t i = 0; i < r.hypotheses.size(); ++i)
    hyps.push_back({{"id", r.hypotheses[i].str()}, {"text", r.hypothesis_texts[i]}});
  doc["hypotheses"] = hyps;
  if (r.winner) doc["winner"] = r.winner->str();
  if (r.observation) {
    doc["observation"] = r.observation->str();
    doc["observation_summary"] = r.observation_summary;
  }
  doc["method"] = r.method;
  if (r.metric) doc["metric"] = *r.metric;
  if (r.strategy) doc["strategy"] = *r.strategy;
  doc["outcome"] = std::string(to_string(r.outcome));
  if (r.confidence) doc["confidence"] = *r.confidence;
  Json chain = Json::array();
  for (const auto& p : r.premise_chain) {
    const Container& c = snapshot.at(p);
    Json link = {{"id", p.str()},
                 {"kind", std::string(to_string(classify_test(snapshot, p)))},
                 {"method", c.text_field("method").value_or("")},
                 {"outcome", std::string(to_string(c.outcome()))}};
    chain.push_back(link);
  }
  doc["premise_chain"] = chain;
  if (r.period_tag) doc["period_tag"] = *r.period_tag;
  if (r.supersedes) doc["supersedes"] = r.supersedes->str();
  return normalize_numbers(doc);
}

std::string report_markdown(const Snapshot& snapshot, const KnowledgeReport& r) {
  std::ostringstream os;
  os << "# " << to_string(r.kind) << " Knowledge " << r.test.str() << "\n\n";
  os << "- Placement: row " << r.placement.row.str() << ", column "
     << r.placement.column_key() << "\n";
  os << "- Period: " << r.period_tag.value_or("-") << "\n";
  if (r.supersedes) os << "- Supersedes: " << r.supersedes->str() << "\n";

  os << "\n## Hypotheses\n\n";
  for (std::size_t i = 0; i < r.hypotheses.size(); ++i) {
    os << "- " << r.hypotheses[i].str() << ": " << r.hypothesis_texts[i];
    if (r.winner && *r.winner == r.hypotheses[i]) os << " (best explains the observation)";
    os << "\n";
  }

  os << "\n## Observation\n\n";
  if (r.observation)
    os << "- " << r.observation->str() << ": " << r.observation_summary << "\n";
  else
    os << "- pending\n";

  os << "\n## Test\n\n";
  os << "- Method: " << r.method << "\n";
  os << "- Metric: " << r.metric.value_or("-") << "\n";
  os << "- Strategy: " << r.strategy.value_or("-") << "\n";
  os << "- Outcome: " << to_string(r.outcome) << "\n";
  os << "- Confidence: " << (r.confidence ? number_text(*r.confidence) : "-") << "\n";

  if (!r.premise_chain.empty()) {
    os << "\n## Premise chain\n\n";
    for (const auto& p : r.premise_chain) {
      const Container& c = snapshot.at(p);
      os << "- " << p.str() << " (" << to_string(classify_test(snapshot, p))
         << "): " << c.text_field("method").value_or("") << ", " << to_string(c.outcome())
         << "\n";
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Backlog
// ---------------------------------------------------------------------------

std::vector<BacklogEntry> backlog(const Snapshot& snapshot) {
  std::vector<BacklogEntry> out;
  GridView grid = grid_view(snapshot);
  for (const auto& [row, col] : grid.tbd) {
    BacklogEntry e;
    e.kind = BacklogEntry::Kind::TbdCell;
    e.row = ContainerId::parse(row);
    e.column = col;
    e.period_tag = snapshot.at(e.row).period_tag.value_or("");
    out.push_back(std::move(e));
  }
  for (const auto& row : grid.rows) {
    for (const auto& test : grid.cell(row, std::string(kPending))) {
      BacklogEntry e;
      e.kind = BacklogEntry::Kind::PendingDeduction;
      e.row = ContainerId::parse(row);
      e.column = std::string(kPending);
      e.test = test;
      e.period_tag = snapshot.at(test).period_tag.value_or("");
      out.push_back(std::move(e));
    }
  }
  std::sort(out.begin(), out.end(), [](const BacklogEntry& a, const BacklogEntry& b) {
    std::string ta = a.test ? a.test->str() : std::string();
    std::string tb = b.test ? b.test->str() : std::string();
    return std::tie(a.period_tag, a.row, a.column, ta) < std::tie(b.period_tag, b.row, b.column, tb);
  });
  return out;
}

Json backlog_json(const std::vector<BacklogEntry>& entries) {
  Json out = Json::array();
  for (const auto& e : entries) {
    Json item = {{"kind", e.kind == BacklogEntry::Kind::TbdCell ? "TBD" : "pending-deduction"},
                 {"period_tag", e.period_tag},
                 {"row", e.row.str()},
                 {"column", e.column}};
    if (e.test) item["test"] = e.test->str();
    out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid exports
// ---------------------------------------------------------------------------

namespace {

std::string cell_text(const Snapshot& s, const std::vector<ContainerId>& tests) {
  if (tests.empty()) return "TBD";
  std::string out;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    if (i) out += ';';
    out += tests[i].str();
    out += '|';
    out += to_string(s.at(tests[i]).outcome());
  }
  return out;
}

Json axis_json(const Snapshot& s, const std::vector<std::string>& keys) {
  Json out = Json::array();
  for (const auto& key : keys) {
    std::string text;
    if (ContainerId::well_formed(key)) {
      if (const Container* c = s.find(ContainerId::parse(key))) text = display_text(*c);
    }
    out.push_back({{"id", key}, {"text", text}});
  }
  return out;
}

}  // namespace

std::string grid_csv(const Snapshot& snapshot, const GridView& grid) {
  std::string out;
  for (const auto& col : grid.columns) {
    out += ',';
    out += col;
  }
  out += '\n';
  for (const auto& row : grid.rows) {
    out += row;
    for (const auto& col : grid.columns) {
      out += ',';
      out += cell_text(snapshot, grid.cell(row, col));
    }
    out += '\n';
  }
  return out;
}

Json grid_json(const Snapshot& snapshot, const GridView& grid) {
  Json cells = Json::array();
  for (const auto& row : grid.rows) {
    for (const auto& col : grid.columns) {
      Json tests = Json::array();
      for (const auto& t : grid.cell(row, col)) {
        const Container& c = snapshot.at(t);
        Json item = {{"id", t.str()},
                     {"kind", std::string(to_string(classify_test(snapshot, t)))},
                     {"outcome", std::string(to_string(c.outcome()))}};
        if (auto m = c.text_field("metric")) item["metric"] = *m;
        if (auto conf = c.confidence()) item["confidence"] = *conf;
        tests.push_back(item);
      }
      cells.push_back({{"row", row},
                       {"column", col},
                       {"tbd", grid.tbd.count({row, col}) != 0},
                       {"tests", tests}});
    }
  }
  Json doc = {{"rows", axis_json(snapshot, grid.rows)},
              {"columns", axis_json(snapshot, grid.columns)},
              {"cells", cells},
              {"transposed", grid.transposed}};
  return normalize_numbers(doc);
}

std::string grid_table(const Snapshot& snapshot, const GridView& grid) {
  auto label = [](const std::string& key) {
    return ContainerId::well_formed(key) ? short_id(ContainerId::parse(key)) : key;
  };
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{grid.transposed ? "observation" : "hypothesis"};
  for (const auto& col : grid.columns) header.push_back(label(col));
  table.push_back(header);
  for (const auto& row : grid.rows) {
    std::vector<std::string> line{label(row)};
    for (const auto& col : grid.columns) {
      const auto& tests = grid.cell(row, col);
      std::string text;
      for (std::size_t i = 0; i < tests.size(); ++i) {
        if (i) text += ' ';
        text += short_id(tests[i]).substr(0, 8) + ":" +
                std::string(to_string(snapshot.at(tests[i]).outcome()));
      }
      if (text.empty()) text = grid.tbd.count({row, col}) ? "TBD" : "-";
      line.push_back(text);
    }
    table.push_back(line);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : table)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  std::ostringstream os;
  for (const auto& line : table) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      os << line[i];
      if (i + 1 < line.size()) os << std::string(width[i] - line[i].size() + 2, ' ');
    }
    os << "\n";
  }
  return os.str();
}

Json status_json(const StatusSummary& status) {
  Json per_test = Json::object();
  for (const auto& [test, outcome] : status.per_test)
    per_test[test.str()] = std::string(to_string(outcome));
  return {{"hypothesis", status.hypothesis.str()},
          {"per_test", per_test},
          {"summary", std::string(to_string(status.summary))}};
}

}  // namespace evident
