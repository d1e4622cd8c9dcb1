#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mfotl/formula.hpp"
#include "mfotl/problem.hpp"

namespace mfotl {

class NotMonodic : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DsnfResult {
  TemporalProblem problem;
  RenamingLedger ledger;
};

// Closed monodic formula to a satisfiability-equivalent temporal problem.
DsnfResult to_dsnf(const FormulaPtr& phi, Semantics sem = Semantics::Constant);

// Adds sometime l (l <-> L(c)) for every non-ground sometime L(x) and constant c.
TemporalProblem flood_constants(const TemporalProblem& p, RenamingLedger* ledger = nullptr);

struct ExtendedProblem {
  TemporalProblem base;
  std::vector<FormulaPtr> extended;  // first-order over next^i atoms
};

// maximal next-nesting over atoms of X
int next_depth(const std::vector<FormulaPtr>& xs);

// Encodes the first k+1 states with copies P^0..P^k; U, S, E unchanged.
TemporalProblem reduce_extended(const ExtendedProblem& xp);

// the P^i copy name
std::string indexed_name(const std::string& pred, int i);

struct GroundingOptions {
  std::size_t max_clauses = 4096;
};

// All eventualities ground: non-ground step clauses become ground clauses over
// renamed closed sides (forall / exists / constant forms for every subset).
TemporalProblem reduce_ground_eventuality(const TemporalProblem& p, RenamingLedger* ledger = nullptr,
                                          GroundingOptions opt = {});

// All step clauses ground: sometime L(x) becomes sometime (exists x L(x)) plus the constant instances.
TemporalProblem reduce_ground_next_time(const TemporalProblem& p, RenamingLedger* ledger = nullptr);

}  // namespace mfotl
