#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mfotl/formula.hpp"
#include "mfotl/problem.hpp"

namespace mfotl {

using Tuple = std::vector<std::size_t>;
using Relation = std::set<Tuple>;  // propositions: {()} when true

// Ultimately periodic structure: states 0..prefix-1, then a loop of `loop`
// states repeated forever. Expanding domains are frozen on the loop.
struct LassoModel {
  Semantics semantics = Semantics::Constant;
  std::vector<std::string> elements;
  std::vector<std::size_t> birth;  // per element; empty means all born at 0
  std::map<std::string, std::size_t> constants;
  std::size_t prefix = 0, loop = 1;
  std::vector<std::map<std::string, Relation>> states;  // prefix + loop

  std::size_t length() const { return prefix + loop; }
  std::size_t position(std::size_t i) const { return i < length() ? i : prefix + (i - prefix) % loop; }
  std::size_t successor(std::size_t i) const { return position(i + 1); }
  bool present(std::size_t e, std::size_t state) const;
  bool holds(const std::string& pred, std::size_t state, const Tuple& t) const;
};

// throws std::invalid_argument when an invariant of LassoModel is broken
void validate(const LassoModel& m);

using Assignment = std::map<std::string, std::size_t>;

// throws std::invalid_argument on unknown constants, unbound variables or
// (expanding) assignments outside D_n
bool eval(const LassoModel& m, std::size_t n, const Assignment& a, const FormulaPtr& f);

// f at every state, universally closed over its free variables per state
bool holds_everywhere(const LassoModel& m, const FormulaPtr& f);

struct ProblemCheck {
  bool ok = true;
  std::string failing;  // first failing clause
};

// the associated formula at state 0, clause by clause
ProblemCheck check_problem(const LassoModel& m, const TemporalProblem& p);

struct SearchBounds {
  std::size_t max_domain = 2;
  std::size_t max_length = 4;        // prefix + loop
  std::size_t max_vars = 2000000;    // SAT variables per attempt
};

// First lasso model in order (domain size, length, loop start, constant map)
// or nullopt when the bounds are exhausted. Each result passes eval.
std::optional<LassoModel> bounded_search(const TemporalProblem& p, SearchBounds b = {});
std::optional<LassoModel> bounded_search(const FormulaPtr& f, Semantics s, SearchBounds b = {});

// Plain enumeration of every monadic interpretation; reference for tests.
std::optional<LassoModel> enumerate_search(const TemporalProblem& p, std::size_t max_domain, std::size_t max_length);

std::string print_model(const LassoModel& m);
LassoModel parse_model(const std::string& text);

}  // namespace mfotl
