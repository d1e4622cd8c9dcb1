#include "doctest.h"

#include <fstream>
#include <sstream>

#include "mfotl/dsnf.hpp"
#include "mfotl/model.hpp"
#include "mfotl/oracle.hpp"
#include "mfotl/parser.hpp"
#include "mfotl/prover.hpp"
#include "support.hpp"

using namespace mfotl;

namespace {

FormulaPtr F(const char* s) { return parse_formula(s); }

std::string data(const std::string& name) {
  std::ifstream in(std::string(MFOTL_TEST_DATA) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// the closed formula a ledger proposition stands for
FormulaPtr definition(const RenamingLedger& l, const std::string& name) {
  for (auto& e : l.entries)
    if (e.name == name) return e.definition->op() == Op::Iff ? e.definition->kid(1) : e.definition;
  return nullptr;
}

bool dsnf_shape(const TemporalProblem& p) {
  for (auto* part : {&p.universal, &p.initial})
    for (auto& f : *part)
      if (f->has_temporal() || !is_closed(f)) return false;
  return true;
}

}  // namespace

TEST_CASE("output is a temporal problem over closed first-order parts") {
  testsupport::TemporalGen g(31);
  for (int i = 0; i < 300; ++i) {
    auto f = g.sentence(1 + i % 6);
    auto r = to_dsnf(f, i % 2 ? Semantics::Expanding : Semantics::Constant);
    REQUIRE_MESSAGE(dsnf_shape(r.problem), to_string(f));
    CHECK(r.problem.is_monadic());
  }
}

TEST_CASE("size grows linearly") {
  testsupport::TemporalGen g(32);
  double worst = 0;
  for (int i = 0; i < 400; ++i) {
    auto f = g.sentence(1 + i % 8);
    auto r = to_dsnf(f);
    worst = std::max(worst, double(r.problem.size()) / double(f->size()));
  }
  MESSAGE("worst output/input node ratio " << worst);
  CHECK(worst <= 10.0);
  // nested chains: the ratio stays flat as depth grows
  std::vector<double> ratios;
  for (int n : {4, 16, 64}) {
    FormulaPtr f = prop("p");
    for (int k = 0; k < n; ++k) f = k % 2 ? sometime(conj(f, prop("q"))) : until(prop("p"), f);
    ratios.push_back(double(to_dsnf(f).problem.size()) / double(f->size()));
  }
  CHECK(ratios.back() <= ratios.front() * 1.5);
  // repeated sometime and always add nothing
  CHECK(to_dsnf(F("sometime sometime sometime p")).problem.size() == to_dsnf(F("sometime p")).problem.size());
  CHECK(to_dsnf(F("q & always always next p")).problem.size() == to_dsnf(F("q & always next p")).problem.size());
}

TEST_CASE("satisfiability is preserved within lasso bounds") {
  testsupport::TemporalGen g(33);
  g.use_const = false;
  int sat = 0, unsat = 0;
  for (int i = 0; i < 150; ++i) {
    auto sem = i % 2 ? Semantics::Expanding : Semantics::Constant;
    auto f = g.sentence(1 + i % 4);
    auto r = to_dsnf(f, sem);
    auto direct = bounded_search(f, sem, {2, 3});
    auto via = bounded_search(r.problem, {2, 3});
    REQUIRE_MESSAGE(direct.has_value() == via.has_value(), to_string(f));
    if (via) {
      ++sat;
      CHECK_MESSAGE(eval(*via, 0, {}, f), to_string(f));
    } else {
      ++unsat;
    }
  }
  CHECK(sat > 0);
  CHECK(unsat > 0);
}

TEST_CASE("non-monodic input is rejected") {
  CHECK_THROWS_AS(to_dsnf(F("forall x. forall y. always (R(x, y) -> next R(x, y))")), NotMonodic);
  CHECK_NOTHROW(to_dsnf(F("forall x. forall y. (R(x, y) -> next P(x))")));
}

TEST_CASE("flooding adds one ground eventuality per constant") {
  auto p = parse_problem(data("flooding.tp"));
  RenamingLedger l;
  auto q = flood_constants(p, &l);
  REQUIRE(q.eventuality.size() == 2);
  CHECK(q.flooded);
  auto& ev = q.eventuality[1];
  CHECK(ev.ground());
  REQUIRE(l.entries.size() == 1);
  CHECK(l.entries[0].origin == "flood");
  Oracle o;
  auto lit = ev.lit.formula();
  CHECK(o.entails(q.universal, iff(lit, F("~P(c)"))));
  // idempotent
  auto r = flood_constants(q);
  CHECK(r.eventuality.size() == 2);
}

TEST_CASE("unique left-hand sides") {
  auto p = parse_problem("step { P(x) => next Q(x); P(x) => next ~R(x); p => next q; }");
  RenamingLedger l;
  enforce_unique_lhs(p, l);
  CHECK(has_unique_lhs(p));
  CHECK(p.step.size() == 2);
  CHECK(l.entries.size() == 1);
}

TEST_CASE("extended problem reduction") {
  auto pp = parse_problem_file(data("ext_1.tp"));
  ExtendedProblem xp{pp.problem, pp.extended};
  CHECK(next_depth(xp.extended) == 2);
  auto p = reduce_extended(xp);
  std::vector<std::string> got;
  for (auto& f : p.initial) got.push_back(to_string(f));
  std::vector<std::string> want = {
      "exists x. exists y. P^0(x,y)",
      "forall x. forall y. P^0(x,y) -> R^0(x)",
      "forall x. forall y. P^1(x,y) -> R^1(x)",
      "forall x. forall y. P^2(x,y) -> R^2(x)",
      "forall x. R^0(x) -> R^1(x)",
      "forall x. R^1(x) -> R^2(x)",
      "forall x. forall y. P^0(x,y) -> P^2(x,y)",
      "forall x. forall y. P(x,y) <-> P^2(x,y)",
      "forall x. R(x) <-> R^2(x)",
  };
  CHECK(got == want);
  CHECK(p.universal.size() == 1);
  CHECK(p.step.size() == 1);
  CHECK(p.eventuality.size() == 1);
}

TEST_CASE("ground eventuality reduction") {
  auto p = parse_problem(data("ground_ev.tp"));
  RenamingLedger l;
  auto g = reduce_ground_eventuality(p, &l);
  for (auto& c : g.step) CHECK(c.ground());
  REQUIRE(g.step.size() == 6);
  std::vector<std::pair<const char*, const char*>> want = {
      {"exists x. P(x)", "exists x. P(x)"},
      {"forall x. P(x)", "forall x. P(x)"},
      {"exists x. Q(x)", "exists x. ~P(x)"},
      {"forall x. Q(x)", "forall x. ~P(x)"},
      {"exists x. (P(x) & Q(x))", "exists x. (P(x) & ~P(x))"},
      {"forall x. (P(x) | Q(x))", "forall x. (P(x) | ~P(x))"},
  };
  Oracle o;
  for (auto& [a, b] : want) {
    bool found = false;
    for (auto& c : g.step) {
      auto lhs = definition(l, c.lhs.pred), rhs = definition(l, c.rhs.pred);
      REQUIRE(lhs);
      REQUIRE(rhs);
      if (!c.lhs.positive) lhs = negate(lhs);
      if (!c.rhs.positive) rhs = negate(rhs);
      found = found || (o.equivalent({}, lhs, F(a)) && o.equivalent({}, rhs, F(b)));
    }
    CHECK_MESSAGE(found, a << " => next " << b);
  }
  // expanding domains drop the universal forms
  p.semantics = Semantics::Expanding;
  CHECK(reduce_ground_eventuality(p).step.size() == 3);
  CHECK(prove(g).verdict == Verdict::Unsatisfiable);
}

TEST_CASE("ground next-time reduction") {
  auto p = parse_problem(data("ground_next.tp"));
  auto g = reduce_ground_next_time(p);
  REQUIRE(g.eventuality.size() == 1);
  CHECK(g.eventuality[0].ground());
  CHECK(prove(g).verdict == Verdict::Unsatisfiable);
  auto q = parse_problem("initial { Q(c); } step { l => next l; } eventuality { sometime ~Q(x); }");
  auto h = reduce_ground_next_time(q);
  CHECK(h.eventuality.size() == 2);
  CHECK_THROWS(reduce_ground_next_time(parse_problem("step { P(x) => next P(x); }")));
}
