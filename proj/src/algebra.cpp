#include "evident/algebra.hpp"

#include <algorithm>

namespace evident {

GridView permute(const GridView& grid) {
  GridView out;
  out.rows = grid.columns;
  out.columns = grid.rows;
  for (const auto& [key, tests] : grid.cells) out.cells.emplace(GridView::Key{key.second, key.first}, tests);
  for (const auto& key : grid.tbd) out.tbd.insert({key.second, key.first});
  out.transposed = !grid.transposed;
  return out;
}

Snapshot join(const Snapshot& a, const Snapshot& b) {
  Snapshot out;
  std::map<ContainerId, Snapshot::Entry> merged = a.entries();
  for (const auto& [id, entry] : b.entries()) {
    auto [it, fresh] = merged.emplace(id, entry);
    if (fresh) continue;
    Snapshot::Entry& kept = it->second;
    const Container& x = kept.container;
    const Container& y = entry.container;
    if (x.kind != y.kind || x.payload != y.payload || x.labels != y.labels ||
        x.period_tag != y.period_tag)
      throw Error(ErrorCode::ResultInvalid, "same id, different content", {id.str()});
    kept.ordinal = std::min(kept.ordinal, entry.ordinal);
    kept.container.created_at = std::min(x.created_at, y.created_at);
  }
  for (auto& [id, entry] : merged) out.insert(std::move(entry.container), entry.ordinal);
  for (const auto& s : {&a, &b})
    for (const auto& assoc : s->associations()) out.insert(assoc);

  std::map<ContainerId, ContainerId> winners = a.winners();
  for (const auto& [test, hyp] : b.winners()) {
    auto [it, fresh] = winners.emplace(test, hyp);
    if (!fresh && it->second != hyp)
      throw Error(ErrorCode::WinnerConflict, "inputs designate different winners",
                  {test.str(), it->second.str(), hyp.str()});
  }
  for (const auto& [test, hyp] : winners) out.set_winner(test, hyp);

  if (auto violations = validate(out); !violations.empty()) {
    std::vector<std::string> ids;
    for (const auto& v : violations)
      for (const auto& id : v.ids) ids.push_back(id.str());
    throw Error(ErrorCode::ResultInvalid, describe(violations), ids);
  }
  return out;
}

SelectabilityReport is_selectable(const Snapshot& snapshot) {
  SelectabilityReport r;
  for (const auto& a : snapshot.associations())
    if (a.kind == EdgeKind::Premise) r.offending_premise_edges.push_back(a);
  r.selectable = r.offending_premise_edges.empty();
  return r;
}

namespace {

void require_selectable(const Snapshot& snapshot) {
  auto report = is_selectable(snapshot);
  if (report.selectable) return;
  std::vector<std::string> ids;
  for (const auto& a : report.offending_premise_edges) {
    ids.push_back(a.source.str());
    ids.push_back(a.target.str());
  }
  throw Error(ErrorCode::NotSelectable,
              std::to_string(report.offending_premise_edges.size()) +
                  " premise-edge(s) associate Tests with Tests",
              ids);
}

// Copies the kept containers with their ordinals, then every association
// and winner whose endpoints all survived.
Snapshot subset(const Snapshot& snapshot, const std::set<ContainerId>& keep) {
  Snapshot out;
  for (const auto& [id, entry] : snapshot.entries())
    if (keep.count(id)) out.insert(entry.container, entry.ordinal);
  for (const auto& a : snapshot.associations())
    if (keep.count(a.source) && keep.count(a.target)) out.insert(a);
  for (const auto& [test, hyp] : snapshot.winners())
    if (keep.count(test) && keep.count(hyp)) out.set_winner(test, hyp);
  return out;
}

}  // namespace

Snapshot restrict(const Snapshot& snapshot, const std::set<ContainerId>& rows) {
  require_selectable(snapshot);
  for (const auto& id : rows) {
    const Container* c = snapshot.find(id);
    if (!c || c->kind != ContainerKind::Hypothesis)
      throw Error(ErrorCode::UnknownHypothesis, "not a Hypothesis of this EKB", {id.str()});
  }
  std::set<ContainerId> keep(rows.begin(), rows.end());
  for (const auto& o : snapshot.ordered(ContainerKind::Observation)) keep.insert(o);
  for (const auto& t : snapshot.ordered(ContainerKind::Test)) {
    auto hyps = snapshot.sources_into(t, EdgeKind::Hypothesis);
    bool kept;
    if (classify_test(snapshot, t) == KnowledgeKind::Incomplete) {
      kept = std::all_of(hyps.begin(), hyps.end(),
                         [&](const ContainerId& h) { return rows.count(h) != 0; });
    } else {
      kept = rows.count(place_test(snapshot, t).row) != 0;
    }
    if (!kept) continue;
    keep.insert(t);
    keep.insert(hyps.begin(), hyps.end());
  }
  return subset(snapshot, keep);
}

Snapshot project(const Snapshot& snapshot, const std::set<ContainerId>& columns) {
  require_selectable(snapshot);
  for (const auto& id : columns) {
    const Container* c = snapshot.find(id);
    if (!c || c->kind != ContainerKind::Observation)
      throw Error(ErrorCode::UnknownObservation, "not an Observation of this EKB", {id.str()});
  }
  std::set<ContainerId> keep(columns.begin(), columns.end());
  for (const auto& h : snapshot.ordered(ContainerKind::Hypothesis)) keep.insert(h);
  for (const auto& t : snapshot.ordered(ContainerKind::Test)) {
    auto obs = snapshot.sources_into(t, EdgeKind::Observation);
    if (obs.empty() || columns.count(obs.front())) keep.insert(t);
  }
  return subset(snapshot, keep);
}

Snapshot compose(const std::vector<ComposePart>& parts) {
  for (const auto& part : parts) require_selectable(part.snapshot);
  Snapshot acc;
  for (const auto& part : parts) {
    Snapshot selected = part.snapshot;
    if (part.columns) selected = project(selected, *part.columns);
    if (part.rows) selected = restrict(selected, *part.rows);
    acc = join(acc, selected);
  }
  return acc;
}

}  // namespace evident
