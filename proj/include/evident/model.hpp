#pragma once

// evident/model.hpp: containers, associations and the Snapshot value type.
//
// DESIGN INVARIANTS:
//   1. A Container is immutable. Its id is the SHA-256 of the canonical
//      document {kind, labels, payload, period_tag}; created_at is excluded
//      so re-registering the same artifact yields the same id.
//   2. Associations point towards Tests and only towards Tests.
//   3. A Test has at most one observation-edge.
//   4. premise-edges (Test -> Test) form a DAG.
//   5. Knowledge classification is derived from edges + outcome, never stored.
//
// Snapshot itself does not enforce these: it is plain data so that the
// store, the algebra and tests can assemble states. make_association() and
// validate() are the gatekeepers.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evident/canonical.hpp"
#include "evident/error.hpp"

namespace evident {

// "sha256:" + 64 lowercase hex characters.
class ContainerId {
 public:
  ContainerId() = default;

  // Throws Error(MalformedInput) if `text` is not a well-formed id.
  static ContainerId parse(std::string_view text);
  static bool well_formed(std::string_view text);

  const std::string& str() const { return value_; }
  // Hex part without the "sha256:" prefix.
  std::string_view hex() const;
  bool empty() const { return value_.empty(); }

  auto operator<=>(const ContainerId&) const = default;

 private:
  explicit ContainerId(std::string value) : value_(std::move(value)) {}
  std::string value_;
};

enum class ContainerKind { Observation, Hypothesis, Test };
enum class Outcome { Proved, Disproved, Overlooked, Pending };
enum class EdgeKind { Hypothesis, Observation, Premise };
enum class KnowledgeKind { Induction, Abduction, Deduction, Incomplete };

std::string_view to_string(ContainerKind kind);
std::string_view to_string(Outcome outcome);
std::string_view to_string(EdgeKind kind);
std::string_view to_string(KnowledgeKind kind);

// Parsers accept the exact names produced by to_string(). EdgeKind also
// accepts the short forms "hypothesis", "observation" and "premise".
std::optional<ContainerKind> parse_container_kind(std::string_view text);
std::optional<Outcome> parse_outcome(std::string_view text);
std::optional<EdgeKind> parse_edge_kind(std::string_view text);

// Label prefix linking a promoted Test to the Test it replaces.
inline constexpr std::string_view kSupersedesPrefix = "supersedes:";

struct Container {
  ContainerId id;
  ContainerKind kind = ContainerKind::Observation;
  Json payload = Json::object();
  std::int64_t created_at = 0;  // UTC seconds, not part of the id
  std::optional<std::string> period_tag;
  std::vector<std::string> labels;  // sorted, unique

  bool is_test() const { return kind == ContainerKind::Test; }

  // Test payload conventions. outcome() is only meaningful for Tests.
  Outcome outcome() const;
  std::optional<double> confidence() const;
  std::optional<std::string> text_field(std::string_view key) const;
  // Id of the Test this one supersedes, if labelled so.
  std::optional<ContainerId> supersedes() const;

  bool operator==(const Container&) const = default;
};

std::int64_t now_seconds();

// The document whose canonical bytes are hashed into the container id.
Json identity_document(ContainerKind kind, const Json& payload,
                       const std::optional<std::string>& period_tag,
                       const std::vector<std::string>& labels);

// Errors: EmptyPayload; InvalidOutcome (Test outcome missing or not in the
// enum); MalformedPayload (null/non-finite values, payload not an object,
// Test method missing, confidence outside [0,1]).
Container make_container(ContainerKind kind, Json payload,
                         std::optional<std::string> period_tag = std::nullopt,
                         std::vector<std::string> labels = {},
                         std::int64_t created_at = now_seconds());

// Full container record including created_at (used by the log and exports).
Json container_to_json(const Container& c);
// Rebuilds and re-validates a container; throws IdMismatch if the recorded
// id does not match the recomputed one.
Container container_from_json(const Json& doc);

struct Association {
  ContainerId source;
  ContainerId target;
  EdgeKind kind = EdgeKind::Hypothesis;

  auto operator<=>(const Association&) const = default;
};

Json association_to_json(const Association& a);
Association association_from_json(const Json& doc);

class Snapshot {
 public:
  struct Entry {
    Container container;
    // Rank of first appearance; rows and columns of the grid follow it.
    std::uint64_t ordinal = 0;
    bool operator==(const Entry&) const = default;
  };

  const std::map<ContainerId, Entry>& entries() const { return entries_; }
  const std::set<Association>& associations() const { return associations_; }
  const std::map<ContainerId, ContainerId>& winners() const { return winners_; }

  std::size_t size() const { return entries_.size(); }
  bool empty() const {
    return entries_.empty() && associations_.empty() && winners_.empty();
  }
  bool contains(const ContainerId& id) const { return entries_.count(id) != 0; }
  const Container* find(const ContainerId& id) const;
  // Throws DanglingReference.
  const Container& at(const ContainerId& id) const;
  std::optional<std::uint64_t> ordinal(const ContainerId& id) const;
  std::uint64_t next_ordinal() const;

  // Ids of one kind in grid order: (ordinal, id).
  std::vector<ContainerId> ordered(ContainerKind kind) const;

  // Unchecked mutators. A container already present keeps its entry.
  void insert(Container c, std::optional<std::uint64_t> ordinal = std::nullopt);
  void insert(Association a);
  void set_winner(const ContainerId& test, const ContainerId& hypothesis);

  // Edge lookups, sorted by source/target id.
  std::vector<ContainerId> sources_into(const ContainerId& target,
                                        EdgeKind kind) const;
  std::vector<ContainerId> targets_from(const ContainerId& source,
                                        EdgeKind kind) const;
  std::optional<ContainerId> winner(const ContainerId& test) const;

  // Tests that some other Test in this snapshot supersedes.
  std::set<ContainerId> superseded() const;

  bool operator==(const Snapshot& other) const;

 private:
  std::map<ContainerId, Entry> entries_;
  std::set<Association> associations_;
  std::map<ContainerId, ContainerId> winners_;
  // Derived indexes over associations_.
  std::map<ContainerId, std::set<Association>> incoming_;
  std::map<ContainerId, std::set<Association>> outgoing_;
};

// Checks `source -> target` of `kind` against `snapshot` without mutating
// it. Errors, in check order: DanglingReference, InvalidTarget,
// KindMismatch, SingleObservationViolation, CycleDetected, InvalidPremise.
Association make_association(const Snapshot& snapshot, const ContainerId& source,
                             const ContainerId& target, EdgeKind kind);

// Induction / Abduction test without looking at premise-edges.
bool is_evidence_knowledge(const Snapshot& snapshot, const ContainerId& test);

// Errors: DanglingReference; NotATest.
KnowledgeKind classify_test(const Snapshot& snapshot, const ContainerId& test);

struct Violation {
  ErrorCode rule;
  std::vector<ContainerId> ids;
  std::string detail;
};

// Empty iff every container, association and winner invariant holds.
std::vector<Violation> validate(const Snapshot& snapshot);

// One line per violation: "Rule: detail [ids]".
std::string describe(const std::vector<Violation>& violations);

}  // namespace evident
