#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfotl/clauses.hpp"
#include "mfotl/loop.hpp"
#include "mfotl/oracle.hpp"
#include "mfotl/problem.hpp"

namespace mfotl {

enum class Rule { StepRes, InitTerm, EvRes, EvTerm, GroundEvRes, GroundEvTerm, Induction };
const char* to_string(Rule r);

struct RuleApplication {
  Rule rule = Rule::StepRes;
  std::vector<std::string> premises;
  FormulaPtr conclusion;  // added to U for resolution rules
  std::vector<FullMergedClause> loop;
  FormulaPtr loop_formula;
  std::size_t universal_before = 0;  // |U| when the rule fired
  std::vector<Transcript> transcripts;
};

enum class Verdict { Unsatisfiable, Saturated, ResourceLimit };
const char* to_string(Verdict v);

struct Derivation {
  TemporalProblem problem;           // after flooding; I, S, E never change
  std::vector<FormulaPtr> universal;  // final U; the first problem.universal.size() entries are U_0
  std::vector<RuleApplication> steps;
  Verdict verdict = Verdict::Saturated;
  std::string message;
  std::uint64_t oracle_calls = 0;

  // U_k: the universal part before step k
  std::vector<FormulaPtr> universal_at(std::size_t k) const;
};

struct ProverOptions {
  bool flood = true;
  bool two_stage_trace = false;  // Induction records before eventuality resolution
  int max_rounds = 10000;
  std::size_t max_schemes = 200000;
  std::uint64_t oracle_budget = 0;
  LoopOptions loop;
};

Derivation prove(const TemporalProblem& p, ProverOptions opt = {});

// not A when U and B are inconsistent
std::optional<FormulaPtr> step_resolution(const FullMergedClause& m, const std::vector<FormulaPtr>& U, Oracle& o);

// forall x of the conjunction of ~lhs over the loop clauses (closed for ground loops)
FormulaPtr eventuality_conclusion(const LoopResult& loop);

// Re-runs every recorded side condition with a fresh oracle.
bool replay(const Derivation& d, std::string* error = nullptr);

std::string trace_text(const Derivation& d);
std::string trace_jsonl(const Derivation& d);
// parses a JSON-lines trace and re-checks its transcripts
bool replay_jsonl(const std::string& text, std::string* error = nullptr);

}  // namespace mfotl
