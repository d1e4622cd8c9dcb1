#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfotl/formula.hpp"

namespace mfotl {

enum class Semantics { Constant, Expanding };

// A configured cap (schemes, subsets, iterations, oracle calls) was exceeded.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* to_string(Semantics s);

// Literal of a step or eventuality clause: either a proposition or P(x).
struct Literal {
  std::string pred;
  bool positive = true;
  bool unary = false;

  FormulaPtr formula(const std::string& var = "x") const;
  Literal negated() const { return {pred, !positive, unary}; }
  std::string key() const;
  bool operator==(const Literal&) const = default;
  auto operator<=>(const Literal&) const = default;
};

// extracts a literal from P(v), ~P(v), p or ~p; false otherwise
bool as_literal(const FormulaPtr& f, Literal& out);

struct StepClause {
  Literal lhs, rhs;
  bool ground() const { return !lhs.unary; }
  FormulaPtr formula() const;  // lhs -> next rhs (x free when non-ground)
  std::string key() const;
  bool operator==(const StepClause&) const = default;
};

struct Eventuality {
  Literal lit;
  bool ground() const { return !lit.unary; }
  std::string key() const { return "sometime " + lit.key(); }
  bool operator==(const Eventuality&) const = default;
};

struct LedgerEntry {
  std::string name;
  std::string origin;  // surrogate, waitfor, fixpoint, fo-rename, flood, ground, extended
  FormulaPtr definition;
};

struct RenamingLedger {
  std::vector<LedgerEntry> entries;
  void add(std::string name, std::string origin, FormulaPtr def) {
    entries.push_back({std::move(name), std::move(origin), std::move(def)});
  }
};

struct TemporalProblem {
  std::vector<FormulaPtr> universal;
  std::vector<FormulaPtr> initial;
  std::vector<StepClause> step;
  std::vector<Eventuality> eventuality;
  Semantics semantics = Semantics::Constant;
  bool flooded = false;

  Signature signature() const;
  std::vector<std::string> constants() const;
  bool is_monadic() const;
  std::size_t size() const;  // syntax-tree nodes of the associated formula
};

// I & always U & always forall x S & always forall x E
FormulaPtr associated_formula(const TemporalProblem& p);

// non-ground step clauses and eventualities
std::vector<StepClause> non_ground_steps(const TemporalProblem& p);
std::vector<StepClause> ground_steps(const TemporalProblem& p);

// Merges clauses sharing a lhs into L => next N with N -> M1 & M2 & ... in U.
void enforce_unique_lhs(TemporalProblem& p, RenamingLedger& ledger);
bool has_unique_lhs(const TemporalProblem& p);

// Fresh symbol names relative to everything already in use.
class NameSupply {
 public:
  NameSupply() = default;
  explicit NameSupply(const Signature& sig);
  void reserve(const std::string& n) { used_.insert(n); }
  void reserve(const Signature& sig);
  std::string fresh(const std::string& base);
  std::string numbered(const std::string& prefix);

 private:
  std::set<std::string> used_;
  int counter_ = 0;
};

std::string print_problem(const TemporalProblem& p, const RenamingLedger* ledger = nullptr);

}  // namespace mfotl
