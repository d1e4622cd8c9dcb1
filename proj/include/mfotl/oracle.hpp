#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mfotl/formula.hpp"

namespace mfotl {

// Colours are bitmasks over `predicates`: bit i set iff predicates[i] holds.
using Colour = std::uint32_t;

struct AbstractStructure {
  std::vector<std::string> predicates;  // unary
  std::vector<Colour> colours;          // realized colours, sorted, non-empty
  std::map<std::string, bool> props;
  std::map<std::string, Colour> constant_colour;

  int index_of(const std::string& pred) const;  // -1 if absent
  std::string describe() const;
};

// Truth of a closed monadic sentence; throws std::invalid_argument on unknown symbols.
bool evaluate(const AbstractStructure& s, const FormulaPtr& f);

class FragmentUnsupported : public std::runtime_error {
 public:
  explicit FragmentUnsupported(const std::string& pred)
      : std::runtime_error("fragment unsupported: predicate " + pred + " is not monadic"), predicate(pred) {}
  std::string predicate;
};

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleQuery {
  std::vector<FormulaPtr> hypotheses;
  FormulaPtr goal;  // null: pure satisfiability
};

struct Transcript {
  std::string kind;  // "sat" or "entails"
  std::vector<FormulaPtr> hypotheses;
  FormulaPtr goal;
  bool result = false;
};

// Hook for non-monadic universal parts; nothing implements it here.
class ExternalOracle {
 public:
  virtual ~ExternalOracle() = default;
  virtual bool is_satisfiable(const OracleQuery& q) = 0;
  virtual bool entails(const std::vector<FormulaPtr>& hyps, const FormulaPtr& goal) = 0;
  virtual bool evaluate(const AbstractStructure& s, const FormulaPtr& f) = 0;
};

class Oracle {
 public:
  bool is_satisfiable(const std::vector<FormulaPtr>& sentences, AbstractStructure* witness = nullptr);
  bool is_satisfiable(const OracleQuery& q, AbstractStructure* witness = nullptr);
  bool entails(const std::vector<FormulaPtr>& hyps, const FormulaPtr& goal);
  bool valid(const FormulaPtr& goal) { return entails({}, goal); }
  bool equivalent(const std::vector<FormulaPtr>& hyps, const FormulaPtr& a, const FormulaPtr& b);

  std::uint64_t calls() const { return calls_; }
  std::uint64_t solver_calls() const { return solver_calls_; }
  std::uint64_t pool_hits() const { return pool_hits_; }
  void set_budget(std::uint64_t b) { budget_ = b; }
  void set_recorder(std::vector<Transcript>* r) { recorder_ = r; }
  void register_external(std::shared_ptr<ExternalOracle> ext) { external_ = std::move(ext); }

 private:
  // sentences[0..base) are hypotheses; models of them found earlier answer
  // later satisfiable queries over the same hypotheses without the solver
  bool decide(const std::vector<FormulaPtr>& sentences, AbstractStructure* witness, std::size_t base);

  struct Pool {
    std::vector<FormulaPtr> base;
    std::vector<AbstractStructure> models;
    std::uint64_t stamp = 0;
  };
  Pool& pool_for(const std::vector<FormulaPtr>& sentences, std::size_t base);
  static constexpr std::size_t kPools = 4, kPoolModels = 64;
  std::vector<Pool> pools_;
  std::uint64_t clock_ = 0, pool_hits_ = 0;

  struct Entry {
    bool sat;
    std::optional<AbstractStructure> witness;
  };
  std::unordered_map<std::string, Entry> memo_;
  std::uint64_t calls_ = 0, solver_calls_ = 0, budget_ = 0;
  std::vector<Transcript>* recorder_ = nullptr;
  std::shared_ptr<ExternalOracle> external_;
};

// Direct SAT-encoding decision without memo or budget (the witness is minimized and checked).
bool monadic_satisfiable(const std::vector<FormulaPtr>& sentences, AbstractStructure* witness = nullptr);

}  // namespace mfotl
