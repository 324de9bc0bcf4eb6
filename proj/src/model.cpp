#include "evident/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

namespace evident {

// ---------------------------------------------------------------------------
// ContainerId
// ---------------------------------------------------------------------------

bool ContainerId::well_formed(std::string_view text) {
  return text.size() == kDigestPrefix.size() + 64 &&
         text.substr(0, kDigestPrefix.size()) == kDigestPrefix &&
         is_lower_hex(text.substr(kDigestPrefix.size()));
}

ContainerId ContainerId::parse(std::string_view text) {
  if (!well_formed(text))
    throw Error(ErrorCode::MalformedInput,
                "not a container id: '" + std::string(text) + "'");
  return ContainerId(std::string(text));
}

std::string_view ContainerId::hex() const {
  return std::string_view(value_).substr(
      std::min(value_.size(), kDigestPrefix.size()));
}

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

std::string_view to_string(ContainerKind kind) {
  switch (kind) {
    case ContainerKind::Observation: return "Observation";
    case ContainerKind::Hypothesis: return "Hypothesis";
    case ContainerKind::Test: return "Test";
  }
  return "?";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Proved: return "proved";
    case Outcome::Disproved: return "disproved";
    case Outcome::Overlooked: return "overlooked";
    case Outcome::Pending: return "pending";
  }
  return "?";
}

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Hypothesis: return "hypothesis-edge";
    case EdgeKind::Observation: return "observation-edge";
    case EdgeKind::Premise: return "premise-edge";
  }
  return "?";
}

std::string_view to_string(KnowledgeKind kind) {
  switch (kind) {
    case KnowledgeKind::Induction: return "Induction";
    case KnowledgeKind::Abduction: return "Abduction";
    case KnowledgeKind::Deduction: return "Deduction";
    case KnowledgeKind::Incomplete: return "Incomplete";
  }
  return "?";
}

std::optional<ContainerKind> parse_container_kind(std::string_view text) {
  for (auto k : {ContainerKind::Observation, ContainerKind::Hypothesis,
                 ContainerKind::Test})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

std::optional<Outcome> parse_outcome(std::string_view text) {
  for (auto o : {Outcome::Proved, Outcome::Disproved, Outcome::Overlooked,
                 Outcome::Pending})
    if (to_string(o) == text) return o;
  return std::nullopt;
}

std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
  if (text == "hypothesis" || text == "hypothesis-edge") return EdgeKind::Hypothesis;
  if (text == "observation" || text == "observation-edge") return EdgeKind::Observation;
  if (text == "premise" || text == "premise-edge") return EdgeKind::Premise;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Container
// ---------------------------------------------------------------------------

Outcome Container::outcome() const {
  auto it = payload.find("outcome");
  if (it == payload.end() || !it->is_string()) return Outcome::Pending;
  return parse_outcome(it->get_ref<const std::string&>()).value_or(Outcome::Pending);
}

std::optional<double> Container::confidence() const {
  auto it = payload.find("confidence");
  if (it == payload.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

std::optional<std::string> Container::text_field(std::string_view key) const {
  auto it = payload.find(std::string(key));
  if (it == payload.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

std::optional<ContainerId> Container::supersedes() const {
  for (const auto& label : labels) {
    if (label.rfind(kSupersedesPrefix, 0) == 0) {
      auto rest = std::string_view(label).substr(kSupersedesPrefix.size());
      if (ContainerId::well_formed(rest)) return ContainerId::parse(rest);
    }
  }
  return std::nullopt;
}

std::int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

namespace {

void reject_nulls(const Json& value, const std::string& path) {
  if (value.is_null())
    throw Error(ErrorCode::MalformedPayload, "null value at '" + path + "'");
  if (value.is_object()) {
    for (const auto& [key, item] : value.items()) reject_nulls(item, path + "." + key);
  } else if (value.is_array()) {
    std::size_t i = 0;
    for (const auto& item : value) reject_nulls(item, path + "[" + std::to_string(i++) + "]");
  }
}

void require_optional_string(const Json& payload, const char* key) {
  auto it = payload.find(key);
  if (it != payload.end() && !it->is_string())
    throw Error(ErrorCode::MalformedPayload,
                std::string("Test field '") + key + "' must be a string");
}

// Container-level rules shared by make_container, container_from_json and
// validate().
void check_payload(ContainerKind kind, const Json& payload) {
  if (!payload.is_object())
    throw Error(ErrorCode::MalformedPayload, "payload must be a map");
  if (payload.empty()) throw Error(ErrorCode::EmptyPayload, "payload is empty");
  reject_nulls(payload, "payload");
  (void)canonical_dump(payload);  // non-finite numbers, bad UTF-8

  if (kind != ContainerKind::Test) return;
  auto outcome = payload.find("outcome");
  if (outcome == payload.end())
    throw Error(ErrorCode::InvalidOutcome, "Test payload has no outcome");
  if (!outcome->is_string() || !parse_outcome(outcome->get_ref<const std::string&>()))
    throw Error(ErrorCode::InvalidOutcome,
                "outcome must be one of proved, disproved, overlooked, pending; got " +
                    outcome->dump());
  auto method = payload.find("method");
  if (method == payload.end() || !method->is_string())
    throw Error(ErrorCode::MalformedPayload, "Test payload needs a string 'method'");
  require_optional_string(payload, "metric");
  require_optional_string(payload, "strategy");
  auto confidence = payload.find("confidence");
  if (confidence != payload.end()) {
    if (!confidence->is_number())
      throw Error(ErrorCode::MalformedPayload, "confidence must be a number");
    double v = confidence->get<double>();
    if (!(v >= 0.0 && v <= 1.0))
      throw Error(ErrorCode::MalformedPayload, "confidence must lie in [0,1]");
  }
}

std::vector<std::string> normalize_labels(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

ContainerId compute_id(ContainerKind kind, const Json& payload,
                       const std::optional<std::string>& period_tag,
                       const std::vector<std::string>& labels) {
  return ContainerId::parse(
      content_digest(canonical_dump(identity_document(kind, payload, period_tag, labels))));
}

}  // namespace

Json identity_document(ContainerKind kind, const Json& payload,
                       const std::optional<std::string>& period_tag,
                       const std::vector<std::string>& labels) {
  Json doc = Json::object();
  doc["kind"] = std::string(to_string(kind));
  doc["labels"] = labels;
  doc["payload"] = payload;
  if (period_tag) doc["period_tag"] = *period_tag;
  return doc;
}

Container make_container(ContainerKind kind, Json payload,
                         std::optional<std::string> period_tag,
                         std::vector<std::string> labels,
                         std::int64_t created_at) {
  payload = normalize_numbers(std::move(payload));
  check_payload(kind, payload);
  labels = normalize_labels(std::move(labels));
  try {
    (void)canonical_dump(Json(labels));
    if (period_tag) (void)canonical_dump(Json(*period_tag));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedPayload, "labels/period_tag: " + e.message());
  }
  Container c;
  c.id = compute_id(kind, payload, period_tag, labels);
  c.kind = kind;
  c.payload = std::move(payload);
  c.created_at = created_at;
  c.period_tag = std::move(period_tag);
  c.labels = std::move(labels);
  return c;
}

Json container_to_json(const Container& c) {
  Json doc = Json::object();
  doc["id"] = c.id.str();
  doc["kind"] = std::string(to_string(c.kind));
  doc["payload"] = c.payload;
  doc["created_at"] = c.created_at;
  doc["labels"] = c.labels;
  if (c.period_tag) doc["period_tag"] = *c.period_tag;
  return doc;
}

namespace {
const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object())
    throw Error(ErrorCode::MalformedInput, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end())
    throw Error(ErrorCode::MalformedInput, std::string("missing field '") + key + "'");
  return *it;
}

const std::string& string_field(const Json& doc, const char* key) {
  const Json& v = field(doc, key);
  if (!v.is_string())
    throw Error(ErrorCode::MalformedInput, std::string("field '") + key + "' must be a string");
  return v.get_ref<const std::string&>();
}
}  // namespace

Container container_from_json(const Json& doc) {
  auto kind = parse_container_kind(string_field(doc, "kind"));
  if (!kind) throw Error(ErrorCode::MalformedInput, "unknown container kind");
  const Json& created = field(doc, "created_at");
  if (!created.is_number_integer())
    throw Error(ErrorCode::MalformedInput, "created_at must be an integer");
  std::optional<std::string> period;
  if (doc.contains("period_tag")) period = string_field(doc, "period_tag");
  std::vector<std::string> labels;
  const Json& raw_labels = field(doc, "labels");
  if (!raw_labels.is_array())
    throw Error(ErrorCode::MalformedInput, "labels must be a list");
  for (const auto& l : raw_labels) {
    if (!l.is_string()) throw Error(ErrorCode::MalformedInput, "labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  auto recorded = ContainerId::parse(string_field(doc, "id"));
  Container c = make_container(*kind, field(doc, "payload"), period, labels,
                               created.get<std::int64_t>());
  if (c.id != recorded)
    throw Error(ErrorCode::IdMismatch,
                "recorded id does not match content (recomputed " + c.id.str() + ")",
                {recorded.str()});
  return c;
}

Json association_to_json(const Association& a) {
  return Json{{"source", a.source.str()},
              {"target", a.target.str()},
              {"kind", std::string(to_string(a.kind))}};
}

Association association_from_json(const Json& doc) {
  auto kind = parse_edge_kind(string_field(doc, "kind"));
  if (!kind) throw Error(ErrorCode::MalformedInput, "unknown association kind");
  return Association{ContainerId::parse(string_field(doc, "source")),
                     ContainerId::parse(string_field(doc, "target")), *kind};
}

// ---------------------------------------------------------------------------
// Snapshot
// ---------------------------------------------------------------------------

const Container* Snapshot::find(const ContainerId& id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second.container;
}

const Container& Snapshot::at(const ContainerId& id) const {
  const Container* c = find(id);
  if (!c) throw Error(ErrorCode::DanglingReference, "unknown container " + id.str(), {id.str()});
  return *c;
}

std::optional<std::uint64_t> Snapshot::ordinal(const ContainerId& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second.ordinal;
}

std::uint64_t Snapshot::next_ordinal() const {
  std::uint64_t next = 0;
  for (const auto& [id, entry] : entries_) next = std::max(next, entry.ordinal + 1);
  return next;
}

std::vector<ContainerId> Snapshot::ordered(ContainerKind kind) const {
  std::vector<std::pair<std::uint64_t, ContainerId>> keyed;
  for (const auto& [id, entry] : entries_)
    if (entry.container.kind == kind) keyed.emplace_back(entry.ordinal, id);
  std::sort(keyed.begin(), keyed.end());
  std::vector<ContainerId> out;
  out.reserve(keyed.size());
  for (auto& [ord, id] : keyed) out.push_back(std::move(id));
  return out;
}

void Snapshot::insert(Container c, std::optional<std::uint64_t> ordinal) {
  if (entries_.count(c.id)) return;
  std::uint64_t ord = ordinal ? *ordinal : next_ordinal();
  ContainerId id = c.id;
  entries_.emplace(std::move(id), Entry{std::move(c), ord});
}

void Snapshot::insert(Association a) {
  if (!associations_.insert(a).second) return;
  incoming_[a.target].insert(a);
  outgoing_[a.source].insert(a);
}

void Snapshot::set_winner(const ContainerId& test, const ContainerId& hypothesis) {
  winners_[test] = hypothesis;
}

std::vector<ContainerId> Snapshot::sources_into(const ContainerId& target,
                                                EdgeKind kind) const {
  std::vector<ContainerId> out;
  auto it = incoming_.find(target);
  if (it == incoming_.end()) return out;
  for (const auto& a : it->second)
    if (a.kind == kind) out.push_back(a.source);
  return out;
}

std::vector<ContainerId> Snapshot::targets_from(const ContainerId& source,
                                                EdgeKind kind) const {
  std::vector<ContainerId> out;
  auto it = outgoing_.find(source);
  if (it == outgoing_.end()) return out;
  for (const auto& a : it->second)
    if (a.kind == kind) out.push_back(a.target);
  return out;
}

std::optional<ContainerId> Snapshot::winner(const ContainerId& test) const {
  auto it = winners_.find(test);
  if (it == winners_.end()) return std::nullopt;
  return it->second;
}

std::set<ContainerId> Snapshot::superseded() const {
  std::set<ContainerId> out;
  for (const auto& [id, entry] : entries_) {
    if (!entry.container.is_test()) continue;
    if (auto prev = entry.container.supersedes(); prev && *prev != id) {
      const Container* old = find(*prev);
      if (old && old->is_test()) out.insert(*prev);
    }
  }
  return out;
}

bool Snapshot::operator==(const Snapshot& other) const {
  return entries_ == other.entries_ && associations_ == other.associations_ &&
         winners_ == other.winners_;
}

// ---------------------------------------------------------------------------
// Associations and classification
// ---------------------------------------------------------------------------

namespace {

ContainerKind required_source(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Hypothesis: return ContainerKind::Hypothesis;
    case EdgeKind::Observation: return ContainerKind::Observation;
    case EdgeKind::Premise: return ContainerKind::Test;
  }
  return ContainerKind::Test;
}

// True if `to` is reachable from `from` along premise-edges.
bool premise_reachable(const Snapshot& s, const ContainerId& from, const ContainerId& to) {
  std::vector<ContainerId> stack{from};
  std::set<ContainerId> seen{from};
  while (!stack.empty()) {
    ContainerId cur = std::move(stack.back());
    stack.pop_back();
    if (cur == to) return true;
    for (auto& next : s.targets_from(cur, EdgeKind::Premise))
      if (seen.insert(next).second) stack.push_back(std::move(next));
  }
  return false;
}

bool decided(Outcome o) { return o == Outcome::Proved || o == Outcome::Disproved; }

}  // namespace

Association make_association(const Snapshot& snapshot, const ContainerId& source,
                             const ContainerId& target, EdgeKind kind) {
  const Container* src = snapshot.find(source);
  const Container* dst = snapshot.find(target);
  if (!src || !dst) {
    std::vector<std::string> missing;
    if (!src) missing.push_back(source.str());
    if (!dst) missing.push_back(target.str());
    throw Error(ErrorCode::DanglingReference, "association endpoint not in snapshot",
                missing);
  }
  if (!dst->is_test())
    throw Error(ErrorCode::InvalidTarget,
                "associations must target a Test, not a " + std::string(to_string(dst->kind)),
                {target.str()});
  if (src->kind != required_source(kind))
    throw Error(ErrorCode::KindMismatch,
                std::string(to_string(kind)) + " needs a " +
                    std::string(to_string(required_source(kind))) + " source, got " +
                    std::string(to_string(src->kind)),
                {source.str()});
  if (kind == EdgeKind::Observation &&
      !snapshot.sources_into(target, EdgeKind::Observation).empty())
    throw Error(ErrorCode::SingleObservationViolation,
                "Test already has an observation", {target.str()});
  if (kind == EdgeKind::Premise) {
    if (source == target || premise_reachable(snapshot, target, source))
      throw Error(ErrorCode::CycleDetected, "premise-edge would close a cycle",
                  {source.str(), target.str()});
    if (!is_evidence_knowledge(snapshot, target))
      throw Error(ErrorCode::InvalidPremise,
                  "premise must be an induction or abduction Test", {target.str()});
  }
  return Association{source, target, kind};
}

bool is_evidence_knowledge(const Snapshot& snapshot, const ContainerId& test) {
  const Container* c = snapshot.find(test);
  if (!c || !c->is_test()) return false;
  auto hyps = snapshot.sources_into(test, EdgeKind::Hypothesis).size();
  auto obs = snapshot.sources_into(test, EdgeKind::Observation).size();
  if (obs != 1 || !decided(c->outcome())) return false;
  if (hyps == 1) return true;
  return hyps >= 2 && snapshot.winner(test).has_value();
}

KnowledgeKind classify_test(const Snapshot& snapshot, const ContainerId& test) {
  const Container& c = snapshot.at(test);
  if (!c.is_test())
    throw Error(ErrorCode::NotATest, test.str() + " is a " + std::string(to_string(c.kind)),
                {test.str()});
  auto hyps = snapshot.sources_into(test, EdgeKind::Hypothesis).size();
  auto obs = snapshot.sources_into(test, EdgeKind::Observation).size();
  Outcome outcome = c.outcome();

  if (obs == 1 && decided(outcome)) {
    if (hyps == 1) return KnowledgeKind::Induction;
    if (hyps >= 2 && snapshot.winner(test)) return KnowledgeKind::Abduction;
  }
  if (hyps == 1 && (obs == 0 || (obs == 1 && outcome == Outcome::Overlooked))) {
    for (const auto& premise : snapshot.targets_from(test, EdgeKind::Premise))
      if (is_evidence_knowledge(snapshot, premise)) return KnowledgeKind::Deduction;
  }
  return KnowledgeKind::Incomplete;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

std::vector<Violation> validate(const Snapshot& snapshot) {
  std::vector<Violation> out;
  auto add = [&](ErrorCode rule, std::vector<ContainerId> ids, std::string detail) {
    out.push_back(Violation{rule, std::move(ids), std::move(detail)});
  };

  for (const auto& [id, entry] : snapshot.entries()) {
    const Container& c = entry.container;
    if (c.id != id) add(ErrorCode::IdMismatch, {id}, "entry key differs from container id");
    try {
      check_payload(c.kind, c.payload);
      if (compute_id(c.kind, c.payload, c.period_tag, c.labels) != c.id)
        add(ErrorCode::IdMismatch, {c.id}, "id does not match content");
    } catch (const Error& e) {
      add(e.code(), {c.id}, e.message());
    }
  }

  std::map<ContainerId, std::vector<ContainerId>> observations_into;
  for (const auto& a : snapshot.associations()) {
    const Container* src = snapshot.find(a.source);
    const Container* dst = snapshot.find(a.target);
    if (!src || !dst) {
      add(ErrorCode::DanglingReference, {a.source, a.target}, "association endpoint missing");
      continue;
    }
    if (!dst->is_test())
      add(ErrorCode::InvalidTarget, {a.source, a.target}, "association targets a non-Test");
    if (src->kind != required_source(a.kind))
      add(ErrorCode::KindMismatch, {a.source, a.target},
          std::string(to_string(a.kind)) + " from a " + std::string(to_string(src->kind)));
    if (a.kind == EdgeKind::Premise && a.source == a.target)
      add(ErrorCode::CycleDetected, {a.source}, "premise self-edge");
    if (a.kind == EdgeKind::Observation) observations_into[a.target].push_back(a.source);
  }
  for (auto& [test, sources] : observations_into) {
    if (sources.size() > 1) {
      std::vector<ContainerId> ids{test};
      ids.insert(ids.end(), sources.begin(), sources.end());
      add(ErrorCode::SingleObservationViolation, ids, "Test has several observations");
    }
  }

  // Premise relation must be acyclic: iterative DFS, report each back edge.
  enum class Mark { White, Grey, Black };
  std::map<ContainerId, Mark> mark;
  for (const auto& [id, entry] : snapshot.entries()) {
    if (mark[id] != Mark::White) continue;
    std::vector<std::pair<ContainerId, std::vector<ContainerId>>> stack;
    std::vector<ContainerId> path;
    mark[id] = Mark::Grey;
    path.push_back(id);
    stack.emplace_back(id, snapshot.targets_from(id, EdgeKind::Premise));
    while (!stack.empty()) {
      auto& [node, pending] = stack.back();
      if (pending.empty()) {
        mark[node] = Mark::Black;
        path.pop_back();
        stack.pop_back();
        continue;
      }
      ContainerId next = pending.back();
      pending.pop_back();
      if (next == node) continue;  // reported above as a self-edge
      Mark m = mark[next];
      if (m == Mark::Grey) {
        auto start = std::find(path.begin(), path.end(), next);
        add(ErrorCode::CycleDetected, std::vector<ContainerId>(start, path.end()),
            "premise-edges form a cycle");
      } else if (m == Mark::White) {
        mark[next] = Mark::Grey;
        path.push_back(next);
        auto targets = snapshot.targets_from(next, EdgeKind::Premise);
        stack.emplace_back(next, std::move(targets));
      }
    }
  }

  for (const auto& [test, hyp] : snapshot.winners()) {
    const Container* t = snapshot.find(test);
    const Container* h = snapshot.find(hyp);
    if (!t || !h) {
      add(ErrorCode::DanglingReference, {test, hyp}, "winner references unknown container");
      continue;
    }
    auto hyps = snapshot.sources_into(test, EdgeKind::Hypothesis);
    if (!t->is_test() || h->kind != ContainerKind::Hypothesis ||
        std::find(hyps.begin(), hyps.end(), hyp) == hyps.end())
      add(ErrorCode::InvalidWinner, {test, hyp},
          "winner must be a Hypothesis with a hypothesis-edge into the Test");
  }
  return out;
}

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  bool first = true;
  for (const auto& v : violations) {
    if (!first) os << "\n";
    first = false;
    os << to_string(v.rule) << ": " << v.detail << " [";
    for (std::size_t i = 0; i < v.ids.size(); ++i) os << (i ? ", " : "") << v.ids[i].str();
    os << "]";
  }
  return os.str();
}

}  // namespace evident
