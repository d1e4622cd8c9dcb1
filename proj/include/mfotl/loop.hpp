#pragma once

#include <vector>

#include "mfotl/clauses.hpp"
#include "mfotl/oracle.hpp"
#include "mfotl/problem.hpp"

namespace mfotl {

struct LoopIteration {
  int index = 0;  // i + 1
  std::size_t qualifying = 0;
  std::vector<FullMergedClause> retained;
  FormulaPtr H;
};

struct LoopResult {
  enum class Kind { NoLoop, Loop, Degenerate };
  Kind kind = Kind::NoLoop;
  Eventuality eventuality;
  FormulaPtr H;                          // loop formula (x free for non-ground)
  std::vector<FullMergedClause> clauses;  // pruned last N
  std::vector<LoopIteration> iterations;

  bool found() const { return kind != Kind::NoLoop; }
};

struct LoopOptions {
  int max_iter = 256;
  std::size_t max_schemes = 200000;
};

// Breadth-first loop search for sometime L(x) against the universal part U.
// `candidates` defaults to the canonical full merged clauses of p.
LoopResult bfs_loop(const TemporalProblem& p, const Eventuality& ev, const std::vector<FormulaPtr>& U, Oracle& o,
                    LoopOptions opt = {}, const std::vector<FullMergedClause>* candidates = nullptr);

// Same over merged clauses and closed formulae, for sometime l.
LoopResult bfs_loop_ground(const TemporalProblem& p, const Eventuality& ev, const std::vector<FormulaPtr>& U,
                           Oracle& o, LoopOptions opt = {}, const std::vector<FullMergedClause>* candidates = nullptr);

// Keeps clauses whose lhs is not implied by another retained lhs; first in order wins ties.
std::vector<FullMergedClause> prune_candidates(const std::vector<FullMergedClause>& n, Oracle& o);

// disjunction of left-hand sides
FormulaPtr loop_formula(const std::vector<FullMergedClause>& n);

}  // namespace mfotl
