#include "doctest.h"

#include <fstream>
#include <sstream>

#include "mfotl/clauses.hpp"
#include "mfotl/oracle.hpp"
#include "mfotl/parser.hpp"

using namespace mfotl;

namespace {

FormulaPtr F(const char* s) { return parse_formula(s); }

std::string data(const std::string& name) {
  std::ifstream in(std::string(MFOTL_TEST_DATA) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const ColourScheme* find_scheme(const std::vector<ColourScheme>& cs, std::vector<Colour> gamma, std::uint64_t theta) {
  std::sort(gamma.begin(), gamma.end());
  for (auto& c : cs) {
    auto g = c.gamma;
    std::sort(g.begin(), g.end());
    if (g == gamma && c.theta == theta) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("colour schemes of the two-eventuality problem") {
  auto p = parse_problem(data("graph_1.tp"));
  auto space = temporal_space(p);
  CHECK(space.predicates == std::vector<std::string>{"P"});
  CHECK(space.props == std::vector<std::string>{"l"});
  CHECK(space.colour_count() == 2);
  CHECK((std::size_t(1) << space.props.size()) == 2);
  auto cs = colour_schemes(space);
  CHECK(cs.size() == 6);
  CHECK(scheme_count(space) == doctest::Approx(6));

  // gamma1 = [P], gamma2 = [~P]; theta1 = l, theta2 = ~l
  const Colour g1 = 1, g2 = 0;
  struct Row {
    std::vector<Colour> gamma;
    std::uint64_t theta;
    const char *F, *A, *B;
  };
  std::vector<Row> table = {
      {{g1}, 1, "(exists x. P(x)) & (forall x. P(x)) & l", "(exists x. P(x)) & (forall x. P(x))",
       "(exists x. P(x)) & (forall x. P(x))"},
      {{g2}, 1, "(exists x. ~P(x)) & (forall x. ~P(x)) & l", "true", "true"},
      {{g1, g2}, 1, "(exists x. P(x)) & (exists x. ~P(x)) & l", "exists x. P(x)", "exists x. P(x)"},
      {{g1}, 0, "(exists x. P(x)) & (forall x. P(x)) & ~l", "(exists x. P(x)) & (forall x. P(x))",
       "(exists x. P(x)) & (forall x. P(x))"},
      {{g2}, 0, "(exists x. ~P(x)) & (forall x. ~P(x)) & ~l", "true", "true"},
      {{g1, g2}, 0, "(exists x. P(x)) & (exists x. ~P(x)) & ~l", "exists x. P(x)", "exists x. P(x)"},
  };
  SchemeCalculus calc(p, space);
  Oracle o;
  for (auto& r : table) {
    auto* c = find_scheme(cs, r.gamma, r.theta);
    REQUIRE(c);
    auto t = calc.categorical(*c);
    CHECK_MESSAGE(o.equivalent({}, t.F, F(r.F)), c->describe(space));
    CHECK_MESSAGE(o.equivalent({}, t.A, F(r.A)), c->describe(space));
    CHECK_MESSAGE(o.equivalent({}, t.B, F(r.B)), c->describe(space));
  }
}

TEST_CASE("expanding domains drop the universal transfer") {
  auto p = parse_problem(data("graph_1.tp"));
  p.semantics = Semantics::Expanding;
  auto space = temporal_space(p);
  SchemeCalculus calc(p, space);
  Oracle o;
  auto cs = colour_schemes(space);
  auto* c = find_scheme(cs, {1}, 1);
  REQUIRE(c);
  auto t = calc.categorical(*c);
  CHECK(o.equivalent({}, t.A, F("exists x. P(x)")));
  CHECK(o.equivalent({}, t.B, F("exists x. P(x)")));
}

TEST_CASE("scheme enumeration order and cap") {
  ColourSpace s;
  s.predicates = {"P", "Q"};
  s.props = {"p"};
  s.constants = {"c"};
  // 2 thetas, 15 gammas, |gamma| choices of rho
  double expect = 0;
  for (int m = 1; m < 16; ++m) expect += __builtin_popcount(m);
  expect *= 2;
  CHECK(scheme_count(s) == doctest::Approx(expect));
  auto cs = colour_schemes(s);
  CHECK(cs.size() == static_cast<std::size_t>(expect));
  // theta outermost: it changes exactly once along the sequence
  int changes = 0;
  for (std::size_t i = 1; i < cs.size(); ++i) changes += cs[i].theta != cs[i - 1].theta;
  CHECK(changes == 1);
  for (auto& c : cs) {
    REQUIRE(c.rho.size() == 1);
    CHECK(std::find(c.gamma.begin(), c.gamma.end(), c.rho[0]) != c.gamma.end());
  }
  CHECK_THROWS_AS(colour_schemes(s, 10), ResourceLimit);
}

TEST_CASE("derived step clauses of one clause") {
  auto p = parse_problem("step { P(x) => next Q(x); }");
  auto ds = derive_step_clauses(p, {0});
  REQUIRE(ds.size() == 2);
  Oracle o;
  bool fa = false, ex = false;
  for (auto& d : ds) {
    if (d.origin == DerivedOrigin::Forall)
      fa = o.equivalent({}, d.lhs, F("forall x. P(x)")) && o.equivalent({}, d.rhs, F("forall x. Q(x)"));
    if (d.origin == DerivedOrigin::Exists)
      ex = o.equivalent({}, d.lhs, F("exists x. P(x)")) && o.equivalent({}, d.rhs, F("exists x. Q(x)"));
  }
  CHECK(fa);
  CHECK(ex);
  p.semantics = Semantics::Expanding;
  CHECK(derive_step_clauses(p, {0}).size() == 1);
  auto q = parse_problem("initial { P(c); } step { P(x) => next Q(x); }");
  auto dq = derive_step_clauses(q, {0});
  CHECK(dq.size() == 3);
  CHECK(std::count_if(dq.begin(), dq.end(), [](auto& d) { return d.origin == DerivedOrigin::Constant; }) == 1);
}

TEST_CASE("derived clauses of a pair and their merge") {
  auto p = parse_problem("step { P(x) => next P(x); Q(x) => next ~P(x); }");
  auto ds = derive_step_clauses(p, {0, 1});
  REQUIRE(ds.size() == 2);
  Oracle o;
  auto m = merge(ds);
  CHECK(o.equivalent({}, m.lhs, F("(exists x. (P(x) & Q(x))) & (forall x. (P(x) | Q(x)))")));
  CHECK(o.equivalent({}, m.rhs, F("(exists x. (P(x) & ~P(x))) & (forall x. (P(x) | ~P(x)))")));
  auto fm = full_merge(m, {p.step[0]});
  CHECK(o.valid(forall("x", iff(fm.lhs(), conj(m.lhs, F("P(x)"))))));
  CHECK(o.valid(forall("x", iff(fm.rhs(), conj(m.rhs, F("P(x)"))))));
}

TEST_CASE("canonical candidates are deduplicated and deterministic") {
  auto p = parse_problem(data("loop_example.tp"));
  auto a = canonical_candidates(p);
  auto b = canonical_candidates(p);
  REQUIRE(a.size() == b.size());
  std::set<std::string> keys;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].key() == b[i].key());
    keys.insert(a[i].key());
  }
  CHECK(keys.size() == a.size());
  CandidateOptions merged_only;
  merged_only.with_element = false;
  CHECK(canonical_candidates(p, merged_only).size() <= a.size());
}
