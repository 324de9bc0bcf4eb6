#include "evident/store.hpp"

#include <algorithm>

#include "evident/engine.hpp"

namespace evident {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::AddContainer: return "AddContainer";
    case EventKind::AddAssociation: return "AddAssociation";
    case EventKind::SetWinner: return "SetWinner";
    case EventKind::AttachObservation: return "AttachObservation";
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (auto k : {EventKind::AddContainer, EventKind::AddAssociation, EventKind::SetWinner,
                 EventKind::AttachObservation})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

namespace {

Json hashed_fields(const Event& e) {
  return Json{{"seq", e.seq},
              {"timestamp", e.timestamp},
              {"kind", std::string(to_string(e.kind))},
              {"payload", e.payload},
              {"prev_hash", e.prev_hash}};
}

bool is_hash(const Json& v) {
  return v.is_string() && v.get_ref<const std::string&>().size() == 64 &&
         is_lower_hex(v.get_ref<const std::string&>());
}

const Json& member(const Json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end())
    throw Error(ErrorCode::MalformedInput, std::string("missing field '") + key + "'");
  return *it;
}

ContainerId id_member(const Json& doc, const char* key) {
  const Json& v = member(doc, key);
  if (!v.is_string())
    throw Error(ErrorCode::MalformedInput, std::string("field '") + key + "' must be an id");
  return ContainerId::parse(v.get_ref<const std::string&>());
}

}  // namespace

std::string compute_event_hash(const Event& e) {
  return sha256_hex(canonical_dump(hashed_fields(e)));
}

std::string serialize_event(const Event& e) {
  Json doc = hashed_fields(e);
  doc["hash"] = e.hash;
  return canonical_dump(doc);
}

Event parse_event(std::string_view line) {
  Json doc;
  try {
    doc = Json::parse(line);
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::MalformedInput, std::string("unparseable event: ") + ex.what());
  }
  if (!doc.is_object() || doc.size() != 6)
    throw Error(ErrorCode::MalformedInput, "event must have exactly six fields");
  const Json& seq = member(doc, "seq");
  const Json& ts = member(doc, "timestamp");
  const Json& kind = member(doc, "kind");
  const Json& payload = member(doc, "payload");
  const Json& prev = member(doc, "prev_hash");
  const Json& hash = member(doc, "hash");
  if (!seq.is_number_unsigned() || !ts.is_number_integer() || !kind.is_string() ||
      !payload.is_object() || !is_hash(prev) || !is_hash(hash))
    throw Error(ErrorCode::MalformedInput, "event field has the wrong type");
  auto k = parse_event_kind(kind.get_ref<const std::string&>());
  if (!k) throw Error(ErrorCode::MalformedInput, "unknown event kind");

  Event e;
  e.seq = seq.get<std::uint64_t>();
  e.timestamp = ts.get<std::int64_t>();
  e.kind = *k;
  e.prev_hash = prev.get<std::string>();
  e.hash = hash.get<std::string>();
  // Dumping the parsed document gives the same bytes as serialize_event(e):
  // integral floats print as integers either way.
  std::string canonical;
  try {
    canonical = canonical_dump(doc);
  } catch (const Error& ex) {
    throw Error(ErrorCode::MalformedInput, ex.message());
  }
  if (canonical != line)
    throw Error(ErrorCode::MalformedInput, "event line is not in canonical form");
  e.payload = normalize_numbers(std::move(doc["payload"]));
  return e;
}

// ---------------------------------------------------------------------------
// Payload builders
// ---------------------------------------------------------------------------

Json add_container_payload(const Container& c) {
  return Json{{"container", container_to_json(c)}};
}

Json add_association_payload(const Association& a) { return association_to_json(a); }

Json set_winner_payload(const ContainerId& test, const ContainerId& hypothesis) {
  return Json{{"test", test.str()}, {"hypothesis", hypothesis.str()}};
}

Json attach_observation_payload(const ContainerId& test, const ContainerId& observation,
                                Outcome outcome, std::optional<double> confidence,
                                const std::optional<Container>& inline_observation) {
  Json doc = {{"test", test.str()},
              {"observation", observation.str()},
              {"outcome", std::string(to_string(outcome))}};
  if (confidence) doc["confidence"] = *confidence;
  if (inline_observation) doc["observation_container"] = container_to_json(*inline_observation);
  return normalize_numbers(doc);
}

// ---------------------------------------------------------------------------
// Applying events
// ---------------------------------------------------------------------------

namespace {

void apply_set_winner(Snapshot& s, const Json& payload) {
  ContainerId test = id_member(payload, "test");
  ContainerId hyp = id_member(payload, "hypothesis");
  const Container& t = s.at(test);
  if (!t.is_test()) throw Error(ErrorCode::NotATest, "winner needs a Test", {test.str()});
  const Container& h = s.at(hyp);
  if (h.kind != ContainerKind::Hypothesis)
    throw Error(ErrorCode::NotAHypothesis, "winner must be a Hypothesis", {hyp.str()});
  auto hyps = s.sources_into(test, EdgeKind::Hypothesis);
  if (std::find(hyps.begin(), hyps.end(), hyp) == hyps.end())
    throw Error(ErrorCode::InvalidWinner, "winner has no hypothesis-edge into the Test",
                {test.str(), hyp.str()});
  if (auto current = s.winner(test); current && *current != hyp)
    throw Error(ErrorCode::WinnerConflict, "Test already has a different winner",
                {test.str(), current->str(), hyp.str()});
  s.set_winner(test, hyp);
}

Snapshot apply_attach(Snapshot s, const Event& e) {
  const Json& p = e.payload;
  ContainerId test = id_member(p, "test");
  ContainerId obs = id_member(p, "observation");
  if (auto it = p.find("observation_container"); it != p.end()) {
    Container c = container_from_json(*it);
    if (c.kind != ContainerKind::Observation)
      throw Error(ErrorCode::KindMismatch, "inline observation must be an Observation",
                  {c.id.str()});
    if (c.id != obs)
      throw Error(ErrorCode::IdMismatch, "inline observation id differs", {obs.str()});
    s.insert(std::move(c));
  }
  const Json& raw_outcome = member(p, "outcome");
  auto outcome = raw_outcome.is_string()
                     ? parse_outcome(raw_outcome.get_ref<const std::string&>())
                     : std::nullopt;
  if (!outcome) throw Error(ErrorCode::InvalidOutcome, "promotion outcome is not valid");
  std::optional<double> confidence;
  if (auto it = p.find("confidence"); it != p.end()) {
    if (!it->is_number() || !(it->get<double>() >= 0.0 && it->get<double>() <= 1.0))
      throw Error(ErrorCode::MalformedPayload, "confidence must lie in [0,1]");
    confidence = it->get<double>();
  }
  return attach_observation(s, test, obs, *outcome, confidence, e.timestamp);
}

}  // namespace

Snapshot apply_event(Snapshot snapshot, const Event& event) {
  switch (event.kind) {
    case EventKind::AddContainer: {
      Container c = container_from_json(member(event.payload, "container"));
      snapshot.insert(std::move(c));
      return snapshot;
    }
    case EventKind::AddAssociation: {
      Association a = association_from_json(event.payload);
      snapshot.insert(make_association(snapshot, a.source, a.target, a.kind));
      return snapshot;
    }
    case EventKind::SetWinner:
      apply_set_winner(snapshot, event.payload);
      return snapshot;
    case EventKind::AttachObservation:
      return apply_attach(std::move(snapshot), event);
  }
  throw Error(ErrorCode::MalformedInput, "unknown event kind");
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

namespace {

// Chain checks for event `e` at position `index`; returns a reason or "".
std::string chain_fault(const Event& e, std::uint64_t index, const std::string& prev_hash) {
  if (e.seq != index) return "seq " + std::to_string(e.seq) + " at position " + std::to_string(index);
  if (e.prev_hash != prev_hash) return "prev_hash does not match the previous event";
  if (compute_event_hash(e) != e.hash) return "hash does not match event content";
  return {};
}

VerificationReport fail(std::uint64_t seq, std::string reason, std::size_t checked) {
  VerificationReport r;
  r.ok = false;
  r.first_bad_seq = seq;
  r.reason = std::move(reason);
  r.events = checked;
  return r;
}

}  // namespace

VerificationReport verify_log(const EventLog& log) {
  std::string prev = kGenesisHash;
  const auto& events = log.events();
  for (std::uint64_t i = 0; i < events.size(); ++i) {
    std::string fault;
    try {
      fault = chain_fault(events[i], i, prev);
    } catch (const Error& ex) {
      fault = ex.message();
    }
    if (!fault.empty()) return fail(i, fault, i);
    prev = events[i].hash;
  }
  VerificationReport ok;
  ok.events = events.size();
  return ok;
}

VerificationReport verify_log_bytes(std::string_view bytes) {
  std::string prev = kGenesisHash;
  std::uint64_t index = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos)
      return fail(index, "last record is not newline-terminated", index);
    std::string_view line = bytes.substr(pos, nl - pos);
    Event e;
    try {
      e = parse_event(line);
    } catch (const Error& ex) {
      return fail(index, ex.message(), index);
    }
    // parse_event() has checked that the line is canonical, and "hash" is
    // the first key, so the hashed document is the line minus that member.
    if (e.seq != index)
      return fail(index, "seq " + std::to_string(e.seq) + " at position " + std::to_string(index), index);
    if (e.prev_hash != prev) return fail(index, "prev_hash does not match the previous event", index);
    constexpr std::size_t kHashMember = sizeof("{\"hash\":\"") - 1 + 64 + 2;
    if (sha256_hex("{" + std::string(line.substr(kHashMember))) != e.hash)
      return fail(index, "hash does not match event content", index);
    prev = e.hash;
    ++index;
    pos = nl + 1;
  }
  VerificationReport ok;
  ok.events = index;
  return ok;
}

Json verification_json(const VerificationReport& report) {
  Json doc = {{"ok", report.ok}, {"events", report.events}};
  if (report.first_bad_seq) doc["first_bad_seq"] = *report.first_bad_seq;
  if (!report.reason.empty()) doc["reason"] = report.reason;
  return doc;
}

// ---------------------------------------------------------------------------
// EventLog
// ---------------------------------------------------------------------------

EventLog EventLog::from_events(std::vector<Event> events) {
  EventLog log;
  log.events_ = std::move(events);
  return log;
}

EventLog EventLog::parse(std::string_view bytes) {
  EventLog log;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos)
      throw Error(ErrorCode::MalformedInput, "last record is not newline-terminated");
    log.events_.push_back(parse_event(bytes.substr(pos, nl - pos)));
    pos = nl + 1;
  }
  return log;
}

std::string EventLog::to_bytes() const {
  std::string out;
  for (const auto& e : events_) {
    out += serialize_event(e);
    out += '\n';
  }
  return out;
}

const std::string& EventLog::head_hash() const {
  return events_.empty() ? kGenesisHash : events_.back().hash;
}

const Snapshot& EventLog::state() const {
  if (!head_) {
    auto report = verify_log(*this);
    if (!report.ok)
      throw Error(ErrorCode::ChainCorrupt,
                  "chain breaks at seq " + std::to_string(*report.first_bad_seq) + ": " +
                      report.reason);
    Snapshot s;
    for (const auto& e : events_) s = apply_event(std::move(s), e);
    head_ = std::make_shared<const Snapshot>(std::move(s));
  }
  return *head_;
}

EventLog append_event(EventLog log, EventKind kind, Json payload, std::int64_t timestamp) {
  const Snapshot& current = log.state();
  Event e;
  e.seq = log.events_.size();
  e.timestamp = timestamp;
  e.kind = kind;
  e.prev_hash = log.head_hash();
  Snapshot next;
  try {
    e.payload = normalize_numbers(std::move(payload));
    if (!e.payload.is_object())
      throw Error(ErrorCode::MalformedPayload, "event payload must be a map");
    e.hash = compute_event_hash(e);
    next = apply_event(current, e);
  } catch (const Error& ex) {
    reject(ex);
  }
  log.events_.push_back(std::move(e));
  log.head_ = std::make_shared<const Snapshot>(std::move(next));
  return log;
}

Snapshot replay(const EventLog& log) { return log.state(); }

// ---------------------------------------------------------------------------
// Snapshot export
// ---------------------------------------------------------------------------

Json snapshot_json(const Snapshot& snapshot) {
  Json containers = Json::array();
  for (const auto& [id, entry] : snapshot.entries()) {
    Json c = container_to_json(entry.container);
    c["ordinal"] = entry.ordinal;
    containers.push_back(std::move(c));
  }
  Json associations = Json::array();
  for (const auto& a : snapshot.associations()) associations.push_back(association_to_json(a));
  Json winners = Json::array();
  for (const auto& [test, hyp] : snapshot.winners())
    winners.push_back({{"test", test.str()}, {"hypothesis", hyp.str()}});
  return Json{{"containers", containers}, {"associations", associations}, {"winners", winners}};
}

std::string serialize_snapshot(const Snapshot& snapshot) {
  return canonical_dump(snapshot_json(snapshot));
}

Snapshot snapshot_from_json(const Json& doc) {
  try {
    if (!doc.is_object() || doc.size() != 3)
      throw Error(ErrorCode::MalformedInput,
                  "snapshot needs exactly containers, associations and winners");
    const Json& containers = member(doc, "containers");
    const Json& associations = member(doc, "associations");
    const Json& winners = member(doc, "winners");
    if (!containers.is_array() || !associations.is_array() || !winners.is_array())
      throw Error(ErrorCode::MalformedInput, "snapshot sections must be lists");
    Snapshot s;
    for (const auto& raw : containers) {
      const Json& ordinal = member(raw, "ordinal");
      if (!ordinal.is_number_unsigned())
        throw Error(ErrorCode::MalformedInput, "ordinal must be a non-negative integer");
      Container c = container_from_json(raw);
      if (s.contains(c.id))
        throw Error(ErrorCode::MalformedInput, "duplicate container", {c.id.str()});
      s.insert(std::move(c), ordinal.get<std::uint64_t>());
    }
    for (const auto& raw : associations) s.insert(association_from_json(raw));
    for (const auto& raw : winners) {
      ContainerId test = id_member(raw, "test");
      if (s.winner(test))
        throw Error(ErrorCode::MalformedInput, "duplicate winner entry", {test.str()});
      s.set_winner(test, id_member(raw, "hypothesis"));
    }
    if (auto violations = validate(s); !violations.empty())
      throw Error(ErrorCode::MalformedInput, "invalid snapshot: " + describe(violations));
    return s;
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::MalformedInput) throw;
    throw Error(ErrorCode::MalformedInput, ex.name() + ": " + ex.message(), ex.ids());
  }
}

Snapshot deserialize_snapshot(std::string_view bytes) {
  Json doc;
  try {
    doc = Json::parse(bytes);
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::MalformedInput, std::string("unparseable snapshot: ") + ex.what());
  }
  return snapshot_from_json(doc);
}

}  // namespace evident
