#pragma once

// evident/store.hpp: append-only, hash-chained event log.
//
// DESIGN INVARIANTS (must not be broken):
//   1. seq is dense from 0; prev_hash of event 0 is 64 zeros.
//   2. hash = SHA-256(canonical {kind, payload, prev_hash, seq, timestamp}).
//   3. prev_hash of event n equals hash of event n-1.
//   4. The log only grows. An event is appended only if the snapshot
//      replayed through it still validates; a rejected event leaves the log
//      untouched.
//   5. Stored form is one canonical JSON record per line ('\n'-terminated);
//      any byte that differs from the canonical form is corruption.
//
// Snapshots are never stored as the source of truth: replay() rebuilds them.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evident/model.hpp"

namespace evident {

enum class EventKind { AddContainer, AddAssociation, SetWinner, AttachObservation };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

inline const std::string kGenesisHash(64, '0');

struct Event {
  std::uint64_t seq = 0;
  std::int64_t timestamp = 0;  // UTC seconds
  EventKind kind = EventKind::AddContainer;
  Json payload = Json::object();
  std::string prev_hash = kGenesisHash;
  std::string hash;

  bool operator==(const Event&) const = default;
};

// SHA-256 over the canonical serialization of the hashed fields.
std::string compute_event_hash(const Event& e);
// One stored line, without the trailing newline.
std::string serialize_event(const Event& e);
// Parses one stored line. Throws MalformedInput unless the line is exactly
// the canonical serialization of a well-typed event.
Event parse_event(std::string_view line);

// Event payload builders.
Json add_container_payload(const Container& c);
Json add_association_payload(const Association& a);
Json set_winner_payload(const ContainerId& test, const ContainerId& hypothesis);
// `inline_observation` is registered by the same event before promotion.
Json attach_observation_payload(const ContainerId& test, const ContainerId& observation,
                                Outcome outcome, std::optional<double> confidence,
                                const std::optional<Container>& inline_observation =
                                    std::nullopt);

class EventLog {
 public:
  EventLog() = default;

  // Wraps events as-is; they are verified on first use.
  static EventLog from_events(std::vector<Event> events);
  // Stored form -> events. Throws MalformedInput on any non-canonical line.
  static EventLog parse(std::string_view bytes);
  std::string to_bytes() const;

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const std::string& head_hash() const;

  // Replayed state after the last event; throws like replay().
  const Snapshot& state() const;

 private:
  friend EventLog append_event(EventLog, EventKind, Json, std::int64_t);

  std::vector<Event> events_;
  // Replayed head, set once the whole chain is known good.
  mutable std::shared_ptr<const Snapshot> head_;
};

// Errors: ChainCorrupt (existing log fails verification); ValidationRejected
// wrapping the model error that the new event would cause.
EventLog append_event(EventLog log, EventKind kind, Json payload,
                      std::int64_t timestamp = now_seconds());

// Applies one event to a snapshot in memory with full validation. Errors are
// the raw model errors (DanglingReference, SingleObservationViolation, ...).
Snapshot apply_event(Snapshot snapshot, const Event& event);

// Errors: ChainCorrupt; DanglingReference and other model errors for forged
// logs with a valid chain.
Snapshot replay(const EventLog& log);

struct VerificationReport {
  bool ok = true;
  std::optional<std::uint64_t> first_bad_seq;
  std::string reason;
  std::size_t events = 0;  // events checked before stopping
};

VerificationReport verify_log(const EventLog& log);
// Works on the stored bytes directly so that unparseable lines are reported
// instead of thrown.
VerificationReport verify_log_bytes(std::string_view bytes);
Json verification_json(const VerificationReport& report);

// ---------------------------------------------------------------------------
// Snapshot export (.ekb)
// ---------------------------------------------------------------------------

// {"associations":[...], "containers":[...], "winners":[...]}, each sorted
// by id; no trailing newline.
std::string serialize_snapshot(const Snapshot& snapshot);
Json snapshot_json(const Snapshot& snapshot);
// Throws MalformedInput for malformed or invalid documents.
Snapshot deserialize_snapshot(std::string_view bytes);
Snapshot snapshot_from_json(const Json& doc);

}  // namespace evident
