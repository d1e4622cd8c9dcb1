#pragma once

#include <string>
#include <vector>

#include "mfotl/clauses.hpp"
#include "mfotl/oracle.hpp"
#include "mfotl/problem.hpp"

namespace mfotl {

struct GraphOptions {
  std::size_t max_schemes = 200000;
};

struct BehaviourGraph {
  ColourSpace space;
  Semantics semantics = Semantics::Constant;
  bool flooded = false;
  std::size_t schemes = 0;                // colour schemes enumerated
  std::vector<ColourScheme> vertices;     // reachable U-consistent schemes
  std::vector<std::vector<std::size_t>> succ;
  std::vector<bool> initial;
  std::vector<FormulaPtr> B;  // B_C per vertex
  // schemes that are not vertices: "inconsistent" with U or "unreachable"
  std::vector<std::pair<ColourScheme, std::string>> excluded;

  std::size_t size() const { return vertices.size(); }
  bool empty() const { return vertices.empty(); }
};

// predicate colours: U & exists x (F_g2(x) & B_g1(x)) satisfiable
bool suitable(const SchemeCalculus& calc, Colour g1, Colour g2, const std::vector<FormulaPtr>& U, Oracle& o);
// propositional colours: U & F_t2 & B_t1 satisfiable
bool suitable_theta(const SchemeCalculus& calc, std::uint64_t t1, std::uint64_t t2, const std::vector<FormulaPtr>& U,
                    Oracle& o);

BehaviourGraph build_graph(const TemporalProblem& p, Oracle& o, GraphOptions opt = {});

struct ConditionReport {
  bool ok = true;
  std::string which;  // "1", "2" or "3"
  std::string where;
};

// Model-existence conditions on the vertices marked alive (all when null).
ConditionReport check_model_conditions(const BehaviourGraph& g, const TemporalProblem& p,
                                       const std::vector<bool>* alive = nullptr);

struct DecideOptions {
  bool flood = true;
  std::size_t max_schemes = 200000;
};

struct DecideResult {
  bool satisfiable = false;
  BehaviourGraph graph;
  std::vector<bool> alive;             // stable subgraph
  std::vector<std::string> deletions;  // vertex and reason, in order
  ConditionReport conditions;
};

DecideResult decide(const TemporalProblem& p, DecideOptions opt = {});

// excluded schemes are drawn as dotted nodes without edges
std::string to_dot(const BehaviourGraph& g, const std::vector<bool>* alive = nullptr);

}  // namespace mfotl
