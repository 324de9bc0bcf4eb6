// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Run with --determinism-digest to print only the replay
// digest (used to compare two independent processes).

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "evident/algebra.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "scenario.hpp"

using namespace evident;
using gen::Rng;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

// --- association direction ------------------------------------------------

Verdict association_direction() {
  auto start = Clock::now();
  Rng rng(1001);
  int attempts = 0, non_test = 0, rejected_non_test = 0, accepted = 0, accepted_invalid = 0;
  int wrong_code = 0;
  while (attempts < 2000) {
    Snapshot s = gen::valid_snapshot(rng);
    std::vector<ContainerId> all;
    for (const auto& [id, e] : s.entries()) all.push_back(id);
    for (int i = 0; i < 10; ++i, ++attempts) {
      ContainerId from = gen::one_of(rng, all), to = gen::one_of(rng, all);
      bool target_is_test = s.at(to).kind == ContainerKind::Test;
      if (!target_is_test) ++non_test;
      try {
        Association a = make_association(s, from, to, gen::any_edge(rng));
        ++accepted;
        s.insert(a);
        if (!validate(s).empty()) ++accepted_invalid;
      } catch (const Error& e) {
        if (!target_is_test) {
          ++rejected_non_test;
          if (e.code() != ErrorCode::InvalidTarget) ++wrong_code;
        }
      }
    }
  }
  double secs = seconds_since(start);
  std::ostringstream d;
  d << attempts << " insertions, " << non_test << " into non-Tests, " << rejected_non_test
    << " rejected (" << wrong_code << " with a code other than InvalidTarget), " << accepted
    << " accepted, " << accepted_invalid << " accepted snapshots failing validate, "
    << fmt_seconds(secs) << " (limit 10s)";
  return {attempts >= 1000 && non_test > 0 && rejected_non_test == non_test && wrong_code == 0 &&
              accepted_invalid == 0 && secs < 10.0,
          d.str()};
}

// --- single observation ---------------------------------------------------

Verdict single_observation() {
  const std::vector<Container> hyps = {gen::hypothesis("H1"), gen::hypothesis("H2")};
  const std::vector<Container> obs = {gen::observation("O1"), gen::observation("O2"),
                                      gen::observation("O3")};
  const Container premise = gen::test("premise", Outcome::Proved);
  const std::vector<Outcome> outcomes = {Outcome::Proved, Outcome::Disproved, Outcome::Overlooked,
                                         Outcome::Pending};
  int cases = 0, attempts = 0, rejected = 0;
  for (std::size_t oc = 0; oc < outcomes.size(); ++oc)
    for (int hyp_mask = 0; hyp_mask < 4; ++hyp_mask)
      for (std::size_t first = 0; first < obs.size(); ++first)
        for (int with_premise = 0; with_premise < 2; ++with_premise) {
          Snapshot s;
          for (const auto& c : hyps) s.insert(c);
          for (const auto& c : obs) s.insert(c);
          s.insert(premise);
          s.insert(make_association(s, hyps[0].id, premise.id, EdgeKind::Hypothesis));
          s.insert(make_association(s, obs[2].id, premise.id, EdgeKind::Observation));
          Container t = gen::test("case", outcomes[oc]);
          s.insert(t);
          for (int h = 0; h < 2; ++h)
            if (hyp_mask & (1 << h)) s.insert(make_association(s, hyps[h].id, t.id, EdgeKind::Hypothesis));
          if (hyp_mask == 3 && outcomes[oc] != Outcome::Pending) s.set_winner(t.id, hyps[1].id);
          s.insert(make_association(s, obs[first].id, t.id, EdgeKind::Observation));
          if (with_premise) s.insert(make_association(s, t.id, premise.id, EdgeKind::Premise));
          ++cases;

          // Log holding the same state, to exercise the store path.
          EventLog log;
          for (const auto& [id, e] : s.entries())
            log = append_event(log, EventKind::AddContainer, add_container_payload(e.container));
          for (const auto& a : s.associations())
            log = append_event(log, EventKind::AddAssociation, add_association_payload(a));
          for (const auto& [test, hyp] : s.winners())
            log = append_event(log, EventKind::SetWinner, set_winner_payload(test, hyp));

          for (const auto& second : obs) {
            auto expect = [&](auto&& fn) {
              ++attempts;
              try {
                fn();
              } catch (const Error& e) {
                if (e.root() == ErrorCode::SingleObservationViolation) ++rejected;
              }
            };
            expect([&] { make_association(s, second.id, t.id, EdgeKind::Observation); });
            expect([&] {
              append_event(log, EventKind::AddAssociation,
                           add_association_payload({second.id, t.id, EdgeKind::Observation}));
            });
            expect([&] { attach_observation(s, t.id, second.id, Outcome::Proved); });
          }
        }

  // A promoted successor already carries its observation.
  {
    Snapshot s;
    Container h = gen::hypothesis("H"), o = gen::observation("O"), o2 = gen::observation("O2");
    Container t = gen::test("prediction", Outcome::Pending);
    for (const auto& c : {h, o, o2, premise, t}) s.insert(c);
    s.insert(make_association(s, h.id, premise.id, EdgeKind::Hypothesis));
    s.insert(make_association(s, o.id, premise.id, EdgeKind::Observation));
    s.insert(make_association(s, h.id, t.id, EdgeKind::Hypothesis));
    s.insert(make_association(s, t.id, premise.id, EdgeKind::Premise));
    for (Outcome out : {Outcome::Proved, Outcome::Disproved, Outcome::Overlooked}) {
      Snapshot promoted = attach_observation(s, t.id, o2.id, out, std::nullopt, 5);
      ContainerId succ = promoted_successor(t, out, std::nullopt, 5).id;
      for (const auto& second : {o, o2}) {
        ++attempts;
        ++cases;
        try {
          attach_observation(promoted, succ, second.id, Outcome::Proved);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::SingleObservationViolation) ++rejected;
        }
      }
    }
  }
  std::ostringstream d;
  d << cases << " cases, " << attempts << " second-observation attempts, " << rejected
    << " rejected with SingleObservationViolation ("
    << (attempts ? 100.0 * rejected / attempts : 0.0) << "%)";
  return {attempts > 0 && rejected == attempts, d.str()};
}

// --- classification oracle ------------------------------------------------

Verdict classification_oracle() {
  Rng rng(3003);
  int snapshots = 0, tests = 0, mismatches = 0, grid_mismatches = 0;
  std::map<KnowledgeKind, int> seen;
  for (; snapshots < 600; ++snapshots) {
    bool raw = snapshots % 2 == 1;
    Snapshot s = raw ? gen::raw_snapshot(rng) : gen::valid_snapshot(rng);
    if (s.size() > 12) return {false, "generator exceeded 12 containers"};
    for (const auto& t : s.ordered(ContainerKind::Test)) {
      ++tests;
      KnowledgeKind expected = oracle::classify(s, t);
      ++seen[expected];
      if (classify_test(s, t) != expected) ++mismatches;
    }
    if (!raw) {
      GridView g = grid_view(s);
      std::map<std::pair<std::string, std::string>, std::set<ContainerId>> got;
      for (const auto& [key, ids] : g.cells) got[key] = std::set<ContainerId>(ids.begin(), ids.end());
      if (got != oracle::cells(s)) ++grid_mismatches;
    }
  }
  std::ostringstream d;
  d << snapshots << " snapshots (<=12 containers), " << tests << " Tests, " << mismatches
    << " classification mismatches, " << grid_mismatches << " grid mismatches; oracle saw "
    << seen[KnowledgeKind::Induction] << " induction, " << seen[KnowledgeKind::Abduction]
    << " abduction, " << seen[KnowledgeKind::Deduction] << " deduction, "
    << seen[KnowledgeKind::Incomplete] << " incomplete";
  bool coverage = seen.size() == 4;
  return {snapshots >= 500 && mismatches == 0 && grid_mismatches == 0 && coverage, d.str()};
}

// --- promotion ------------------------------------------------------------

Verdict promotion() {
  Container h4 = gen::hypothesis("H4"), hi = gen::hypothesis("Hind");
  Container oi = gen::observation("Oind"), o5 = gen::observation("O5");
  Container tind = gen::test("cv", Outcome::Proved, "AUC");
  Container t = gen::test("production scoring", Outcome::Pending, "AUC");
  EventLog log;
  for (const auto& c : {h4, hi, oi, o5, tind, t})
    log = append_event(log, EventKind::AddContainer, add_container_payload(c), 10);
  for (const Association& a : {Association{hi.id, tind.id, EdgeKind::Hypothesis},
                               Association{oi.id, tind.id, EdgeKind::Observation},
                               Association{h4.id, t.id, EdgeKind::Hypothesis},
                               Association{t.id, tind.id, EdgeKind::Premise}})
    log = append_event(log, EventKind::AddAssociation, add_association_payload(a), 10);
  const Snapshot& base = log.state();
  if (classify_test(base, t.id) != KnowledgeKind::Deduction)
    return {false, "fixture Test is not a Deduction"};

  struct Case {
    Outcome outcome;
    KnowledgeKind expected;
    std::optional<ContainerId> column;
  };
  const std::vector<Case> cases = {{Outcome::Proved, KnowledgeKind::Induction, o5.id},
                                   {Outcome::Disproved, KnowledgeKind::Induction, o5.id},
                                   {Outcome::Overlooked, KnowledgeKind::Deduction, std::nullopt}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& c : cases) {
    Snapshot promoted = attach_observation(base, t.id, o5.id, c.outcome, 0.8, 20);
    ContainerId succ = promoted_successor(t, c.outcome, 0.8, 20).id;
    KnowledgeKind got = classify_test(promoted, succ);
    GridCoordinate at = place_test(promoted, succ);
    bool original_kept = promoted.contains(t.id) && promoted.size() == base.size() + 1;
    // Same promotion through the store must reach the same state.
    Snapshot stored = append_event(log, EventKind::AttachObservation,
                                   attach_observation_payload(t.id, o5.id, c.outcome, 0.8), 20)
                          .state();
    bool case_ok = got == c.expected && at.row == h4.id && at.column == c.column && original_kept &&
                   stored == promoted;
    ok = ok && case_ok;
    if (&c != &cases.front()) d << " ";
    d << to_string(c.outcome) << "->" << to_string(got) << "@" << (at.column ? "obs" : "PENDING")
      << (case_ok ? "" : "(WRONG)");
  }
  bool pending_rejected = false;
  try {
    attach_observation(base, t.id, o5.id, Outcome::Pending);
  } catch (const Error& e) {
    pending_rejected = e.code() == ErrorCode::InvalidOutcome;
  }
  d << "; pending " << (pending_rejected ? "rejected (InvalidOutcome)" : "NOT rejected");
  return {ok && pending_rejected, d.str()};
}

// --- algebra laws ---------------------------------------------------------

std::string bytes(const Snapshot& s) { return serialize_snapshot(s); }

struct Attempt {
  std::optional<Snapshot> value;
  std::optional<ErrorCode> error;
};

Attempt try_join(const Snapshot& a, const Snapshot& b) {
  try {
    return {join(a, b), std::nullopt};
  } catch (const Error& e) {
    return {std::nullopt, e.code()};
  }
}

Verdict algebra_laws() {
  Rng rng(5005);
  gen::SnapshotOptions opts;
  opts.universe = 4;
  opts.premise_weight = 0.4;
  int pairs = 0, triples = 0, failed_pairs = 0, failed_triples = 0, violations = 0;
  std::string first_violation;
  auto violate = [&](const std::string& what) {
    if (violations++ == 0) first_violation = what;
  };
  for (int i = 0; i < 2000 && (pairs < 250 || triples < 250); ++i) {
    Snapshot a = gen::valid_snapshot(rng, opts), b = gen::valid_snapshot(rng, opts),
             c = gen::valid_snapshot(rng, opts);
    if (bytes(join(a, a)) != bytes(a)) violate("join(A,A) != A");
    if (bytes(join(a, Snapshot{})) != bytes(a)) violate("join(A,empty) != A");
    Attempt ab = try_join(a, b), ba = try_join(b, a);
    if (ab.value.has_value() != ba.value.has_value() || ab.error != ba.error) {
      violate("join(A,B) and join(B,A) disagree on failure");
      continue;
    }
    if (!ab.value) {
      ++failed_pairs;
    } else {
      ++pairs;
      if (bytes(*ab.value) != bytes(*ba.value)) violate("join not commutative");
      if (bytes(join(*ab.value, *ab.value)) != bytes(*ab.value)) violate("join(J,J) != J");
      auto ids = oracle::container_ids(a);
      auto more = oracle::container_ids(b);
      ids.insert(more.begin(), more.end());
      std::set<Association> assoc = a.associations();
      assoc.insert(b.associations().begin(), b.associations().end());
      std::map<ContainerId, ContainerId> winners = a.winners();
      winners.insert(b.winners().begin(), b.winners().end());
      if (oracle::container_ids(*ab.value) != ids || ab.value->associations() != assoc ||
          ab.value->winners() != winners)
        violate("join lost or invented information");
      if (!validate(*ab.value).empty()) violate("join result fails validate");
    }
    Attempt ab_c = ab.value ? try_join(*ab.value, c) : Attempt{std::nullopt, ab.error};
    Attempt bc = try_join(b, c);
    Attempt a_bc = bc.value ? try_join(a, *bc.value) : Attempt{std::nullopt, bc.error};
    if (ab_c.value.has_value() != a_bc.value.has_value()) {
      violate("(A+B)+C and A+(B+C) disagree on failure");
      continue;
    }
    if (!ab_c.value) {
      ++failed_triples;
    } else {
      ++triples;
      if (bytes(*ab_c.value) != bytes(*a_bc.value)) violate("join not associative");
    }
  }

  int grids = 0, grid_violations = 0;
  for (; grids < 250; ++grids) {
    Snapshot s = gen::valid_snapshot(rng);
    GridView g = grid_view(s);
    GridView p = permute(g);
    if (permute(p) != g) ++grid_violations;
    // Transposed-matrix oracle.
    if (p.rows != g.columns || p.columns != g.rows) ++grid_violations;
    for (const auto& r : g.rows)
      for (const auto& col : g.columns)
        if (p.cell(col, r) != g.cell(r, col)) ++grid_violations;
  }
  std::ostringstream d;
  d << pairs << " joined pairs (+" << failed_pairs << " symmetric rejections), " << triples
    << " joined triples (+" << failed_triples << " rejected in both groupings), " << violations
    << " law violations" << (violations ? " [first: " + first_violation + "]" : "") << "; "
    << grids << " grids, " << grid_violations << " permute violations";
  return {pairs >= 200 && triples >= 200 && violations == 0 && grids >= 200 && grid_violations == 0,
          d.str()};
}

// --- selectability gate ---------------------------------------------------

bool has_premise(const Snapshot& s) {
  for (const auto& a : s.associations())
    if (a.kind == EdgeKind::Premise) return true;
  return false;
}

template <class Fn>
bool not_selectable(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == ErrorCode::NotSelectable;
  }
  return false;
}

// Union with the same duplicate rule as join (smallest ordinal and
// created_at), written against raw entries.
std::optional<Snapshot> oracle_union(const Snapshot& a, const Snapshot& b) {
  std::map<ContainerId, Snapshot::Entry> entries = a.entries();
  for (const auto& [id, e] : b.entries()) {
    auto [it, fresh] = entries.emplace(id, e);
    if (!fresh) {
      it->second.ordinal = std::min(it->second.ordinal, e.ordinal);
      it->second.container.created_at = std::min(it->second.container.created_at, e.container.created_at);
    }
  }
  Snapshot out;
  for (const auto& [id, e] : entries) out.insert(e.container, e.ordinal);
  for (const auto* s : {&a, &b}) {
    for (const auto& as : s->associations()) out.insert(as);
    for (const auto& [t, h] : s->winners()) {
      if (auto w = out.winner(t); w && *w != h) return std::nullopt;
      out.set_winner(t, h);
    }
  }
  if (!validate(out).empty()) return std::nullopt;
  return out;
}

template <class T>
std::set<ContainerId> random_subset(Rng& rng, const std::vector<T>& items) {
  std::set<ContainerId> out;
  for (const auto& x : items)
    if (gen::coin(rng)) out.insert(x);
  return out;
}

Verdict selectability_gate() {
  Rng rng(6006);
  gen::SnapshotOptions with_premises;
  with_premises.premise_weight = 1.0;
  with_premises.edge_attempts = 40;
  int gated = 0, gate_ok = 0, report_ok = 0;
  for (int i = 0; i < 20000 && gated < 250; ++i) {
    Snapshot s = gen::valid_snapshot(rng, with_premises);
    if (!has_premise(s)) continue;
    ++gated;
    auto rows = s.ordered(ContainerKind::Hypothesis);
    auto cols = s.ordered(ContainerKind::Observation);
    std::set<ContainerId> all_rows(rows.begin(), rows.end()), all_cols(cols.begin(), cols.end());
    bool ok = not_selectable([&] { restrict(s, all_rows); }) &&
              not_selectable([&] { restrict(s, {}); }) &&
              not_selectable([&] { project(s, all_cols); }) &&
              not_selectable([&] { project(s, {}); }) &&
              not_selectable([&] { compose({ComposePart{s, all_rows, all_cols}}); }) &&
              not_selectable([&] { compose({ComposePart{Snapshot{}, {}, {}}, ComposePart{s, {}, {}}}); });
    if (ok) ++gate_ok;
    auto report = is_selectable(s);
    std::vector<Association> premises;
    for (const auto& a : s.associations())
      if (a.kind == EdgeKind::Premise) premises.push_back(a);
    if (!report.selectable && report.offending_premise_edges == premises) ++report_ok;
  }

  gen::SnapshotOptions selectable_opts;
  selectable_opts.premise_weight = 0.0;
  selectable_opts.universe = 4;
  int checked = 0, mismatches = 0, compose_checked = 0, compose_rejected = 0;
  for (; checked < 250; ++checked) {
    Snapshot s = gen::valid_snapshot(rng, selectable_opts);
    Snapshot s2 = gen::valid_snapshot(rng, selectable_opts);
    auto rows = random_subset(rng, s.ordered(ContainerKind::Hypothesis));
    auto cols = random_subset(rng, s.ordered(ContainerKind::Observation));
    auto rows2 = random_subset(rng, s2.ordered(ContainerKind::Hypothesis));
    auto cols2 = random_subset(rng, s2.ordered(ContainerKind::Observation));
    if (bytes(restrict(s, rows)) != bytes(oracle::restrict(s, rows))) ++mismatches;
    if (bytes(project(s, cols)) != bytes(oracle::project(s, cols))) ++mismatches;
    auto all_rows = s.ordered(ContainerKind::Hypothesis);
    if (bytes(restrict(s, {all_rows.begin(), all_rows.end()})) != bytes(s)) ++mismatches;
    auto all_cols = s.ordered(ContainerKind::Observation);
    if (bytes(project(s, {all_cols.begin(), all_cols.end()})) != bytes(s)) ++mismatches;

    auto part1 = oracle::restrict(oracle::project(s, cols), rows);
    auto part2 = oracle::restrict(oracle::project(s2, cols2), rows2);
    auto expected = oracle_union(part1, part2);
    try {
      Snapshot got = compose({ComposePart{s, rows, cols}, ComposePart{s2, rows2, cols2}});
      ++compose_checked;
      if (!expected || bytes(got) != bytes(*expected)) ++mismatches;
    } catch (const Error& e) {
      ++compose_rejected;
      if (expected) ++mismatches;
    }
  }
  std::ostringstream d;
  d << gated << " premise-bearing snapshots, " << gate_ok << " rejected by every gated verb ("
    << (gated ? 100.0 * gate_ok / gated : 0.0) << "%), " << report_ok
    << " reports listing exactly their premise-edges; " << checked
    << " selectable snapshots vs filter oracle (" << compose_checked << " composed, "
    << compose_rejected << " rejected as conflicting), " << mismatches << " mismatches";
  return {gated >= 200 && gate_ok == gated && report_ok == gated && checked >= 200 && mismatches == 0,
          d.str()};
}

// --- tamper evidence ------------------------------------------------------

Verdict tamper_evidence() {
  Rng rng(7007);
  EventLog log = gen::random_log(rng, 100);
  std::string stored = log.to_bytes();
  if (!verify_log_bytes(stored).ok || oracle::first_bad_line(stored))
    return {false, "pristine log does not verify"};

  std::vector<std::uint64_t> line_of(stored.size());
  std::uint64_t line = 0;
  for (std::size_t i = 0; i < stored.size(); ++i) {
    line_of[i] = line;
    if (stored[i] == '\n') ++line;
  }

  auto start = Clock::now();
  std::size_t mutations = 0, detected = 0, early_enough = 0, oracle_agrees = 0, oracle_checked = 0;
  std::string mutated = stored;
  for (std::size_t pos = 0; pos < stored.size(); ++pos) {
    const char original = stored[pos];
    // Every position is mutated once: a low-bit flip on even positions, a
    // random different byte on odd ones.
    mutated[pos] = static_cast<char>(pos % 2 == 0 ? original ^ 0x01
                                                  : original ^ gen::pick(rng, 1, 255));
    ++mutations;
    VerificationReport r = verify_log_bytes(mutated);
    if (!r.ok) {
      ++detected;
      if (r.first_bad_seq && *r.first_bad_seq <= line_of[pos]) ++early_enough;
    }
    if (pos % 53 == 0) {
      ++oracle_checked;
      auto bad = oracle::first_bad_line(mutated);
      if (bad && *bad <= line_of[pos]) ++oracle_agrees;
    }
    mutated[pos] = original;
  }
  double secs = seconds_since(start);
  std::ostringstream d;
  d << log.size() << "-event log, " << stored.size() << " bytes, " << mutations
    << " single-byte mutations (one per position), " << detected << " detected, " << early_enough
    << " with first-bad-seq <= mutated seq; independent chain oracle agreed on " << oracle_agrees
    << "/" << oracle_checked << " sampled; " << fmt_seconds(secs) << " (limit 60s)";
  return {log.size() == 100 && detected == mutations && early_enough == mutations &&
              oracle_agrees == oracle_checked && secs < 60.0,
          d.str()};
}

// --- determinism ----------------------------------------------------------

std::string determinism_digest(int* mismatches = nullptr, std::size_t* events = nullptr) {
  Rng rng(8008);
  std::string all;
  for (int i = 0; i < 100; ++i) {
    EventLog log = gen::random_log(rng, static_cast<std::size_t>(gen::pick(rng, 10, 60)));
    std::string stored = log.to_bytes();
    std::string first = serialize_snapshot(replay(EventLog::parse(stored)));
    std::string second = serialize_snapshot(replay(EventLog::parse(stored)));
    if (mismatches && (first != second || first != serialize_snapshot(log.state()))) ++*mismatches;
    if (events) *events += log.size();
    all += sha256_hex(stored) + sha256_hex(first) + "\n";
  }
  return sha256_hex(all);
}

std::string self_path;

Verdict determinism() {
  int mismatches = 0;
  std::size_t events = 0;
  std::string digest = determinism_digest(&mismatches, &events);

  std::string other;
  if (FILE* p = popen((self_path + " --determinism-digest").c_str(), "r")) {
    char buf[128];
    while (fgets(buf, sizeof buf, p)) other += buf;
    pclose(p);
  }
  while (!other.empty() && (other.back() == '\n' || other.back() == '\r')) other.pop_back();

  scenario::Built b = scenario::build();
  Snapshot s = replay(EventLog::parse(b.log.to_bytes()));
  std::string csv = grid_csv(s, grid_view(s));
  bool golden = csv == scenario::golden_csv();

  std::ostringstream d;
  d << "100 logs (" << events << " events) replayed twice, " << mismatches
    << " byte differences; second process digest " << (other == digest ? "identical" : "DIFFERENT")
    << "; scenario CSV " << (golden ? "matches" : "DOES NOT MATCH") << " golden file";
  return {mismatches == 0 && other == digest && golden, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  self_path = argv[0];
  if (argc > 1 && std::string(argv[1]) == "--determinism-digest") {
    std::cout << determinism_digest() << "\n";
    return 0;
  }
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"association-direction", association_direction},
      {"single-observation", single_observation},
      {"classification-oracle", classification_oracle},
      {"promotion-semantics", promotion},
      {"algebra-laws", algebra_laws},
      {"selectability-gate", selectability_gate},
      {"tamper-evidence", tamper_evidence},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
