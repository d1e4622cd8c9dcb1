#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mfotl/formula.hpp"
#include "mfotl/oracle.hpp"
#include "mfotl/problem.hpp"

namespace mfotl {

// Symbols a colour scheme ranges over.
struct ColourSpace {
  std::vector<std::string> predicates;  // unary
  std::vector<std::string> props;
  std::vector<std::string> constants;

  Colour mask() const { return predicates.empty() ? 0 : (Colour(~0u) >> (32 - predicates.size())); }
  std::size_t colour_count() const { return std::size_t(1) << predicates.size(); }
  // rank 0 is the all-positive colour
  Colour colour_at_rank(std::size_t r) const { return ~Colour(r) & mask(); }
  std::size_t rank_of(Colour g) const { return ~g & mask(); }
  std::string colour_name(Colour g) const;
  FormulaPtr colour_formula(Colour g, const std::string& var = "x") const;  // F_gamma
  bool contains(const Signature& sig) const;  // every symbol of sig is in the space
};

// predicates and propositions of S and E, all constants of the problem
ColourSpace temporal_space(const TemporalProblem& p);
// lhs predicates of non-ground steps, lhs propositions of ground steps, all constants
ColourSpace step_space(const TemporalProblem& p);

struct ColourScheme {
  std::vector<Colour> gamma;  // ascending rank
  std::uint64_t theta = 0;    // bit i: props[i] true
  std::vector<Colour> rho;    // per constant of the space

  std::string describe(const ColourSpace& s) const;
  AbstractStructure structure(const ColourSpace& s) const;
  bool operator==(const ColourScheme&) const = default;
};

double scheme_count(const ColourSpace& s);
// theta outermost, then Gamma by rank-subset mask, then rho; ResourceLimit beyond max
std::vector<ColourScheme> colour_schemes(const ColourSpace& s, std::size_t max = 200000);

struct CategoricalTriple {
  FormulaPtr F, A, B;
};

struct FullMergedClause {
  FormulaPtr A, B;  // closed merged part
  FormulaPtr a, b;  // x free; true when no original clause is used
  std::string label;

  FormulaPtr lhs() const { return conj(A, a); }
  FormulaPtr rhs() const { return conj(B, b); }
  FormulaPtr formula() const;  // forall x (lhs -> next rhs)
  std::string key() const;
  bool degenerate() const { return lhs()->op() == Op::True && rhs()->op() == Op::True; }
};

// Builds F_C, A_C, B_C and canonical clauses for one problem over one space.
class SchemeCalculus {
 public:
  SchemeCalculus(const TemporalProblem& p, ColourSpace space);

  const ColourSpace& space() const { return space_; }
  Semantics semantics() const { return sem_; }

  FormulaPtr F_gamma(Colour g, const std::string& var = "x") const { return space_.colour_formula(g, var); }
  FormulaPtr A_gamma(Colour g, const std::string& var = "x") const { return side(g, var, true); }
  FormulaPtr B_gamma(Colour g, const std::string& var = "x") const { return side(g, var, false); }
  FormulaPtr F_theta(std::uint64_t theta) const;
  FormulaPtr A_theta(std::uint64_t theta) const { return ground_side(theta, true); }
  FormulaPtr B_theta(std::uint64_t theta) const { return ground_side(theta, false); }

  CategoricalTriple categorical(const ColourScheme& c) const;
  // forall x (A_C & A_gamma(x) -> next (B_C & B_gamma(x))); gamma must be in c.gamma
  FullMergedClause canonical_full(const ColourScheme& c, Colour g) const;
  FullMergedClause canonical_merged(const ColourScheme& c) const;

 private:
  FormulaPtr side(Colour g, const std::string& var, bool lhs) const;
  FormulaPtr ground_side(std::uint64_t theta, bool lhs) const;
  FormulaPtr at_constant(Colour g, const std::string& c, bool lhs) const;
  FormulaPtr transfer(const ColourScheme& c, bool lhs) const;

  ColourSpace space_;
  Semantics sem_;
  std::vector<StepClause> nonground_, ground_;
};

enum class DerivedOrigin { Forall, Exists, Constant, Ground };
const char* to_string(DerivedOrigin o);

struct DerivedStepClause {
  FormulaPtr lhs, rhs;  // closed
  DerivedOrigin origin;
  std::string constant;  // for Constant
};

// derived step clauses of a non-empty subset of non-ground step clauses (indices into p.step)
std::vector<DerivedStepClause> derive_step_clauses(const TemporalProblem& p, const std::vector<std::size_t>& subset);

struct MergedClause {
  FormulaPtr lhs, rhs;  // closed
};
MergedClause merge(const std::vector<DerivedStepClause>& ds);
FullMergedClause full_merge(const MergedClause& m, const std::vector<StepClause>& originals);

struct CandidateOptions {
  bool with_element = true;  // (C, gamma) pairs instead of merged clauses only
  std::size_t max_schemes = 200000;
};

// Canonical full merged clauses over the step projection space, deduplicated, canonical order.
std::vector<FullMergedClause> canonical_candidates(const TemporalProblem& p, CandidateOptions opt = {});

}  // namespace mfotl
