#pragma once

// evident/algebra.hpp: relational operations over EKBs.
//
// permute and join are always available. restrict, project and compose
// need a selectable EKB: one without any premise-edge, i.e. holding only
// induction/abduction Knowledge and no associations among Tests.

#include <set>
#include <vector>

#include "evident/engine.hpp"

namespace evident {

// Swaps rows and columns; PENDING becomes a row. permute(permute(g)) == g.
GridView permute(const GridView& grid);

// Union of containers (by id), associations and winners. Duplicate ids keep
// the smaller ordinal and created_at, so join is commutative.
// Errors: WinnerConflict; ResultInvalid (the union violates an invariant).
Snapshot join(const Snapshot& a, const Snapshot& b);

struct SelectabilityReport {
  bool selectable = true;
  std::vector<Association> offending_premise_edges;
};

SelectabilityReport is_selectable(const Snapshot& snapshot);

// Keeps every Observation, the Hypotheses in `rows`, and the Tests whose
// grid row is in `rows` (plus their losing abduction candidates). Tests
// that are not yet Knowledge stay iff all their hypotheses are kept.
// Errors: NotSelectable; UnknownHypothesis.
Snapshot restrict(const Snapshot& snapshot, const std::set<ContainerId>& rows);

// Keeps every Hypothesis, the Observations in `columns`, and the Tests whose
// observation is in `columns` (Tests without an observation stay).
// Errors: NotSelectable; UnknownObservation.
Snapshot project(const Snapshot& snapshot, const std::set<ContainerId>& columns);

struct ComposePart {
  Snapshot snapshot;
  std::optional<std::set<ContainerId>> rows;     // nullopt = all
  std::optional<std::set<ContainerId>> columns;  // nullopt = all
};

// join-fold of restrict(project(part)) from the left; compose({}) is empty.
// Errors: NotSelectable; WinnerConflict; ResultInvalid; Unknown*.
Snapshot compose(const std::vector<ComposePart>& parts);

}  // namespace evident
