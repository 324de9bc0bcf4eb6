#include "doctest.h"
#include "evident/engine.hpp"
#include "evident/store.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "scenario.hpp"

using namespace evident;

namespace {

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

struct Lab {
  Snapshot s;
  Container add(Container c) {
    s.insert(c);
    return c;
  }
  void link(const Container& from, const Container& to, EdgeKind k) {
    s.insert(make_association(s, from.id, to.id, k));
  }
  Container induction(const Container& h, const Container& o, const std::string& method,
                      Outcome out = Outcome::Proved, std::optional<std::string> metric = std::nullopt,
                      std::optional<double> conf = std::nullopt) {
    Container t = add(gen::test(method, out, std::move(metric), conf));
    link(h, t, EdgeKind::Hypothesis);
    link(o, t, EdgeKind::Observation);
    return t;
  }
};

}  // namespace

TEST_CASE("placement examples") {
  Lab lab;
  auto h1 = lab.add(gen::hypothesis("H1")), h2 = lab.add(gen::hypothesis("H2")),
       h3 = lab.add(gen::hypothesis("H3")), h4 = lab.add(gen::hypothesis("H4"));
  auto o1 = lab.add(gen::observation("O1"));
  auto ti = lab.induction(h1, o1, "cv");
  CHECK(place_test(lab.s, ti.id) == GridCoordinate{h1.id, o1.id});

  auto ta = lab.add(gen::test("abduction", Outcome::Proved));
  for (const auto& h : {h1, h2, h3}) lab.link(h, ta, EdgeKind::Hypothesis);
  lab.link(o1, ta, EdgeKind::Observation);
  CHECK(code_of([&] { place_test(lab.s, ta.id); }) == ErrorCode::Unclassifiable);
  lab.s.set_winner(ta.id, h2.id);
  CHECK(place_test(lab.s, ta.id) == GridCoordinate{h2.id, o1.id});

  auto td = lab.add(gen::test("prediction", Outcome::Pending));
  lab.link(h4, td, EdgeKind::Hypothesis);
  lab.link(td, ti, EdgeKind::Premise);
  GridCoordinate c = place_test(lab.s, td.id);
  CHECK(c.row == h4.id);
  CHECK(c.pending());
  CHECK(c.column_key() == "PENDING");
}

TEST_CASE("grid examples") {
  SUBCASE("empty snapshot") {
    GridView g = grid_view(Snapshot{});
    CHECK(g.rows.empty());
    CHECK(g.columns == std::vector<std::string>{"PENDING"});
    CHECK(g.tbd.empty());
  }
  SUBCASE("2 x 2 with one induction") {
    Lab lab;
    auto h1 = lab.add(gen::hypothesis("H1")), h2 = lab.add(gen::hypothesis("H2"));
    auto o1 = lab.add(gen::observation("O1")), o2 = lab.add(gen::observation("O2"));
    auto t = lab.induction(h1, o1, "cv");
    GridView g = grid_view(lab.s);
    CHECK(g.rows == std::vector<std::string>{h1.id.str(), h2.id.str()});
    CHECK(g.columns == std::vector<std::string>{o1.id.str(), o2.id.str(), "PENDING"});
    CHECK(g.cell(h1.id.str(), o1.id.str()) == std::vector<ContainerId>{t.id});
    std::set<GridView::Key> tbd = {{h1.id.str(), o2.id.str()},
                                   {h2.id.str(), o1.id.str()},
                                   {h2.id.str(), o2.id.str()}};
    CHECK(g.tbd == tbd);
    CHECK(g.cell(h2.id.str(), "PENDING").empty());
  }
  SUBCASE("two metrics share one cell") {
    Lab lab;
    auto h1 = lab.add(gen::hypothesis("H1"));
    auto o1 = lab.add(gen::observation("O1"));
    auto auc = lab.induction(h1, o1, "cv", Outcome::Proved, "AUC");
    auto rmse = lab.induction(h1, o1, "cv", Outcome::Disproved, "RMSE");
    GridView g = grid_view(lab.s);
    CHECK(g.cell(h1.id.str(), o1.id.str()) == std::vector<ContainerId>{auc.id, rmse.id});
    CHECK(g.tbd.empty());
  }
}

TEST_CASE("every classified Test sits in exactly one cell, as the oracle places it") {
  gen::Rng rng(41);
  for (int i = 0; i < 300; ++i) {
    Snapshot s = gen::valid_snapshot(rng);
    GridView g = grid_view(s);
    std::map<ContainerId, int> seen;
    std::map<std::pair<std::string, std::string>, std::set<ContainerId>> got;
    for (const auto& [key, ids] : g.cells)
      for (const auto& id : ids) {
        ++seen[id];
        got[key].insert(id);
      }
    REQUIRE(got == oracle::cells(s));
    for (const auto& t : s.ordered(ContainerKind::Test)) {
      bool placed = classify_test(s, t) != KnowledgeKind::Incomplete;
      REQUIRE(seen[t] == (placed ? 1 : 0));
    }
    // tbd is exactly the empty Hypothesis x Observation cells.
    for (const auto& r : g.rows)
      for (const auto& c : g.columns)
        if (c != "PENDING") REQUIRE(g.tbd.count({r, c}) == (g.cell(r, c).empty() ? 1u : 0u));
  }
}

struct Promotion : Lab {
  Container h4 = add(gen::hypothesis("H4")), h1 = add(gen::hypothesis("H1"));
  Container o1 = add(gen::observation("O1")), o5 = add(gen::observation("O5"));
  Container ti = induction(h1, o1, "cv");
  Container td = add(gen::test("production scoring", Outcome::Pending, "AUC"));
  Promotion() {
    link(h4, td, EdgeKind::Hypothesis);
    link(td, ti, EdgeKind::Premise);
  }
};

TEST_CASE_FIXTURE(Promotion, "promotion examples") {
  Snapshot proved = attach_observation(s, td.id, o5.id, Outcome::Proved, 0.9, 50);
  Container succ = promoted_successor(td, Outcome::Proved, 0.9, 50);
  CHECK(classify_test(proved, succ.id) == KnowledgeKind::Induction);
  CHECK(place_test(proved, succ.id) == GridCoordinate{h4.id, o5.id});
  CHECK(proved.size() == s.size() + 1);
  CHECK(proved.contains(td.id));
  CHECK(succ.supersedes() == td.id);
  CHECK(succ.outcome() == Outcome::Proved);
  CHECK(succ.confidence() == 0.9);
  CHECK(succ.payload.at("metric") == "AUC");
  // The superseded original no longer occupies PENDING.
  GridView g = grid_view(proved);
  CHECK(g.cell(h4.id.str(), "PENDING").empty());
  CHECK(g.cell(h4.id.str(), o5.id.str()) == std::vector<ContainerId>{succ.id});
  // The successor keeps the premise.
  CHECK(proved.targets_from(succ.id, EdgeKind::Premise) == std::vector<ContainerId>{ti.id});

  Snapshot overlooked = attach_observation(s, td.id, o5.id, Outcome::Overlooked, std::nullopt, 50);
  Container succ2 = promoted_successor(td, Outcome::Overlooked, std::nullopt, 50);
  CHECK(classify_test(overlooked, succ2.id) == KnowledgeKind::Deduction);
  CHECK(grid_view(overlooked).cell(h4.id.str(), "PENDING") == std::vector<ContainerId>{succ2.id});

  CHECK(code_of([&] { attach_observation(proved, succ.id, o1.id, Outcome::Proved); }) ==
        ErrorCode::SingleObservationViolation);
  CHECK(code_of([&] { attach_observation(overlooked, succ2.id, o1.id, Outcome::Proved); }) ==
        ErrorCode::SingleObservationViolation);
  CHECK(code_of([&] { attach_observation(s, td.id, o5.id, Outcome::Pending); }) == ErrorCode::InvalidOutcome);
  CHECK(code_of([&] { attach_observation(s, td.id, h1.id, Outcome::Proved); }) == ErrorCode::KindMismatch);
  CHECK(code_of([&] { attach_observation(s, h1.id, o5.id, Outcome::Proved); }) == ErrorCode::NotATest);
  auto loose = add(gen::test("loose", Outcome::Pending));
  link(h1, loose, EdgeKind::Hypothesis);
  CHECK(code_of([&] { attach_observation(s, loose.id, o5.id, Outcome::Proved); }) == ErrorCode::NotDeduction);
}

TEST_CASE("status rule table") {
  using O = Outcome;
  CHECK(summarize({}) == Status::Tbd);
  CHECK(summarize({O::Proved}) == Status::Proved);
  CHECK(summarize({O::Proved, O::Proved}) == Status::Proved);
  CHECK(summarize({O::Disproved}) == Status::Disproved);
  CHECK(summarize({O::Disproved, O::Overlooked}) == Status::Disproved);
  CHECK(summarize({O::Proved, O::Disproved}) == Status::Contested);
  CHECK(summarize({O::Overlooked}) == Status::Overlooked);
  CHECK(summarize({O::Pending}) == Status::Overlooked);

  // Exhaustive over multisets of up to three outcomes against the invariants.
  const std::vector<O> all = {O::Proved, O::Disproved, O::Overlooked, O::Pending};
  std::function<void(std::vector<O>)> walk = [&](std::vector<O> v) {
    bool p = std::count(v.begin(), v.end(), O::Proved) > 0;
    bool d = std::count(v.begin(), v.end(), O::Disproved) > 0;
    Status st = summarize(v);
    REQUIRE((st == Status::Tbd) == v.empty());
    REQUIRE((st == Status::Contested) == (p && d));
    if (!v.empty() && p && !d) REQUIRE(st == Status::Proved);
    if (!v.empty() && d && !p) REQUIRE(st == Status::Disproved);
    if (!v.empty() && !p && !d) REQUIRE(st == Status::Overlooked);
    if (v.size() < 3)
      for (O o : all) {
        auto w = v;
        w.push_back(o);
        walk(w);
      }
  };
  walk({});
}

TEST_CASE("hypothesis status examples") {
  Lab lab;
  auto h1 = lab.add(gen::hypothesis("H1")), h2 = lab.add(gen::hypothesis("H2"));
  auto o1 = lab.add(gen::observation("O1")), o2 = lab.add(gen::observation("O2"));
  auto t1 = lab.induction(h1, o1, "cv", Outcome::Proved);
  StatusSummary st = hypothesis_status(lab.s, h1.id);
  CHECK(st.summary == Status::Proved);
  CHECK(st.per_test == std::map<ContainerId, Outcome>{{t1.id, Outcome::Proved}});
  CHECK(hypothesis_status(lab.s, h2.id).summary == Status::Tbd);
  lab.induction(h1, o2, "holdout", Outcome::Disproved);
  CHECK(hypothesis_status(lab.s, h1.id).summary == Status::Contested);
  CHECK(code_of([&] { hypothesis_status(lab.s, o1.id); }) == ErrorCode::NotAHypothesis);
  CHECK(to_string(Status::Tbd) == "TBD");
  CHECK(status_json(st).dump().find("\"summary\":\"proved\"") != std::string::npos);
}

TEST_CASE("knowledge reports") {
  Promotion p;
  Container t = p.add(gen::test("5-fold CV", Outcome::Proved, "AUC", 0.95));
  p.link(p.h1, t, EdgeKind::Hypothesis);
  p.link(p.o5, t, EdgeKind::Observation);
  KnowledgeReport r = knowledge_report(p.s, t.id);
  CHECK(r.kind == KnowledgeKind::Induction);
  CHECK(r.hypothesis_texts == std::vector<std::string>{"H1"});
  CHECK(r.metric == "AUC");
  CHECK(r.outcome == Outcome::Proved);
  CHECK(r.confidence == 0.95);
  std::string md = report_markdown(p.s, r);
  CHECK(md.find("AUC") != std::string::npos);
  CHECK(md.find("0.95") != std::string::npos);
  CHECK(md.find(p.o5.payload.at("digest").get<std::string>()) != std::string::npos);
  CHECK(md == report_markdown(p.s, knowledge_report(p.s, t.id)));
  CHECK(report_json(p.s, r) == report_json(p.s, knowledge_report(p.s, t.id)));

  KnowledgeReport d = knowledge_report(p.s, p.td.id);
  CHECK(d.kind == KnowledgeKind::Deduction);
  CHECK(d.premise_chain == std::vector<ContainerId>{p.ti.id});
  CHECK(report_markdown(p.s, d).find(p.ti.id.str()) != std::string::npos);

  auto loose = p.add(gen::test("loose", Outcome::Pending));
  CHECK(code_of([&] { knowledge_report(p.s, loose.id); }) == ErrorCode::Unclassifiable);
}

TEST_CASE("backlog: three empty cells and one pending deduction") {
  Lab lab;
  auto h1 = lab.add(gen::hypothesis("H1", 1, "2026-Q4")), h2 = lab.add(gen::hypothesis("H2", 1, "2026-Q3"));
  auto o1 = lab.add(gen::observation("O1")), o2 = lab.add(gen::observation("O2"));
  auto t = lab.induction(h1, o1, "cv");
  auto d = lab.add(gen::test("prediction", Outcome::Pending, std::nullopt, std::nullopt, 1, "2027-Q1"));
  lab.link(h2, d, EdgeKind::Hypothesis);
  lab.link(d, t, EdgeKind::Premise);
  auto items = backlog(lab.s);
  REQUIRE(items.size() == 4);
  // Oracle: enumerate every Hypothesis x Observation cell plus pending tests.
  std::vector<std::tuple<std::string, std::string, std::string>> expected;
  for (const auto& h : {h1, h2})
    for (const auto& o : {o1, o2}) {
      auto cell = oracle::cells(lab.s)[{h.id.str(), o.id.str()}];
      if (cell.empty()) expected.emplace_back(*h.period_tag, h.id.str(), o.id.str());
    }
  expected.emplace_back("2027-Q1", h2.id.str(), "PENDING");
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < items.size(); ++i) {
    CHECK(items[i].period_tag == std::get<0>(expected[i]));
    CHECK(items[i].row.str() == std::get<1>(expected[i]));
    CHECK(items[i].column == std::get<2>(expected[i]));
  }
  CHECK(items.back().kind == BacklogEntry::Kind::PendingDeduction);
  CHECK(items.back().test == d.id);
}

TEST_CASE("csv export") {
  Lab lab;
  auto h = lab.add(gen::hypothesis("H"));
  auto o = lab.add(gen::observation("O"));
  auto t = lab.induction(h, o, "5-fold CV", Outcome::Proved, "AUC");
  CHECK(grid_csv(lab.s, grid_view(lab.s)) == "," + o.id.str() + ",PENDING\n" + h.id.str() + "," +
                                                 t.id.str() + "|proved,TBD\n");
}

TEST_CASE("scenario grid matches the golden file") {
  scenario::Built b = scenario::build();
  const Snapshot& s = b.log.state();
  CHECK(grid_csv(s, grid_view(s)) == scenario::golden_csv());
  CHECK(classify_test(s, b.refs.at("T1")) == KnowledgeKind::Induction);
  CHECK(classify_test(s, b.refs.at("T2")) == KnowledgeKind::Abduction);
  CHECK(classify_test(s, b.refs.at("T3")) == KnowledgeKind::Deduction);
  CHECK(classify_test(s, b.refs.at("T3p")) == KnowledgeKind::Induction);
  Json g = grid_json(s, grid_view(s));
  CHECK(g["columns"].back()["id"] == "PENDING");
  CHECK(g["rows"].size() == 4);
  CHECK(g["transposed"] == false);
}
