#pragma once

// evident/engine.hpp: derived views over a Snapshot.
//
// Grid: rows are Hypotheses, columns are Observations plus one trailing
// PENDING column. Each classified Test sits in exactly one cell:
//   Induction -> (its hypothesis, its observation)
//   Abduction -> (winner hypothesis, its observation)
//   Deduction -> (its hypothesis, PENDING)
// Tests superseded by a promoted successor are kept in the store but are
// not placed; the successor takes over.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evident/model.hpp"

namespace evident {

inline constexpr std::string_view kPending = "PENDING";

struct GridCoordinate {
  ContainerId row;
  std::optional<ContainerId> column;  // nullopt = PENDING

  bool pending() const { return !column.has_value(); }
  // Column key as used by GridView: the id string or "PENDING".
  std::string column_key() const;
  bool operator==(const GridCoordinate&) const = default;
};

// Errors: Unclassifiable (Incomplete Test); NotATest; DanglingReference.
GridCoordinate place_test(const Snapshot& snapshot, const ContainerId& test);

// Axis keys are container id strings or "PENDING". permute() swaps axes, so
// PENDING may end up as a row.
struct GridView {
  using Key = std::pair<std::string, std::string>;  // (row, column)

  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::map<Key, std::vector<ContainerId>> cells;  // non-empty cells only
  std::set<Key> tbd;  // empty (Hypothesis, Observation) cells
  bool transposed = false;

  const std::vector<ContainerId>& cell(const std::string& row,
                                       const std::string& column) const;
  bool operator==(const GridView&) const = default;
};

GridView grid_view(const Snapshot& snapshot);

// Tests placed by grid_view(): classified and not superseded, in grid order.
std::vector<ContainerId> placed_tests(const Snapshot& snapshot);

// Promotes a Deduction Test with a proving/disproving/overlooking
// Observation. Returns a new Snapshot holding a successor Test (payload with
// outcome/confidence replaced, labelled "supersedes:<test>") that carries
// the original hypothesis-edge and premise-edges plus the new
// observation-edge. The original Test is kept.
// Errors: DanglingReference; NotATest; InvalidOutcome (pending or not an
// outcome); SingleObservationViolation; NotDeduction; KindMismatch (obs is
// not an Observation); MalformedPayload (confidence outside [0,1]).
Snapshot attach_observation(const Snapshot& snapshot, const ContainerId& test,
                            const ContainerId& observation, Outcome outcome,
                            std::optional<double> confidence = std::nullopt,
                            std::int64_t created_at = now_seconds());

// The successor container attach_observation() would create.
Container promoted_successor(const Container& original, Outcome outcome,
                             std::optional<double> confidence,
                             std::int64_t created_at);

enum class Status { Proved, Disproved, Overlooked, Contested, Tbd };
std::string_view to_string(Status status);

struct StatusSummary {
  ContainerId hypothesis;
  std::map<ContainerId, Outcome> per_test;
  Status summary = Status::Tbd;
};

// Errors: NotAHypothesis; DanglingReference.
StatusSummary hypothesis_status(const Snapshot& snapshot, const ContainerId& hypothesis);

// Rule table: none -> TBD; proved and disproved -> contested; proved ->
// proved; disproved -> disproved; otherwise overlooked.
Status summarize(const std::vector<Outcome>& outcomes);

struct KnowledgeReport {
  ContainerId test;
  KnowledgeKind kind = KnowledgeKind::Incomplete;
  GridCoordinate placement;
  std::vector<ContainerId> hypotheses;  // all candidates, sorted by grid order
  std::optional<ContainerId> winner;
  std::vector<std::string> hypothesis_texts;
  std::optional<ContainerId> observation;
  std::string observation_summary;
  std::string method;
  std::optional<std::string> metric;
  std::optional<std::string> strategy;
  Outcome outcome = Outcome::Pending;
  std::optional<double> confidence;
  // Premise Tests reachable along premise-edges, breadth-first.
  std::vector<ContainerId> premise_chain;
  std::optional<std::string> period_tag;
  std::optional<ContainerId> supersedes;
};

// Errors: Unclassifiable; NotATest; DanglingReference.
KnowledgeReport knowledge_report(const Snapshot& snapshot, const ContainerId& test);

struct BacklogEntry {
  enum class Kind { TbdCell, PendingDeduction };
  Kind kind = Kind::TbdCell;
  std::string period_tag;  // empty when untagged
  ContainerId row;
  std::string column;  // observation id or "PENDING"
  std::optional<ContainerId> test;  // pending Deduction only
  bool operator==(const BacklogEntry&) const = default;
};

// TBD cells (period tag of the row Hypothesis) and pending Deductions
// (period tag of the Test), sorted by (period_tag, row, column, test).
std::vector<BacklogEntry> backlog(const Snapshot& snapshot);

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

// CSV: header "," + column keys; one line per row: key, then cells as
// ';'-joined "testid|outcome", "TBD" when empty. '\n' line endings.
std::string grid_csv(const Snapshot& snapshot, const GridView& grid);
Json grid_json(const Snapshot& snapshot, const GridView& grid);
// Fixed-width table with abbreviated ids for terminals.
std::string grid_table(const Snapshot& snapshot, const GridView& grid);

Json status_json(const StatusSummary& status);
Json report_json(const Snapshot& snapshot, const KnowledgeReport& report);
std::string report_markdown(const Snapshot& snapshot, const KnowledgeReport& report);
Json backlog_json(const std::vector<BacklogEntry>& entries);

// Short display text for a container: its "text", "name", "dataset" or
// "method" field, else the canonical payload.
std::string display_text(const Container& c);
// "sha256:" stripped, first 12 hex characters.
std::string short_id(const ContainerId& id);

}  // namespace evident
