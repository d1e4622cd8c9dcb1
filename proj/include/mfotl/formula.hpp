#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfotl {

enum class Op {
  Atom, True, False,
  Not, And, Or, Implies, Iff,
  Forall, Exists,
  Next, Always, Sometime, Until, Unless
};

struct Term {
  enum class Kind { Var, Const };
  Kind kind = Kind::Var;
  std::string name;

  static Term var(std::string n) { return {Kind::Var, std::move(n)}; }
  static Term constant(std::string n) { return {Kind::Const, std::move(n)}; }
  bool is_var() const { return kind == Kind::Var; }
  bool operator==(const Term&) const = default;
  auto operator<=>(const Term&) const = default;
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable syntax tree node. And/Or are n-ary, flattened, sorted by key and
// deduplicated at construction; the key is the printed form.
class Formula {
 public:
  Op op() const { return op_; }
  const std::string& name() const { return name_; }  // predicate or bound variable
  const std::vector<Term>& args() const { return args_; }
  const std::vector<FormulaPtr>& kids() const { return kids_; }
  const FormulaPtr& kid(std::size_t i) const { return kids_.at(i); }
  const std::string& key() const { return key_; }
  std::size_t size() const { return size_; }

  bool is_atom() const { return op_ == Op::Atom; }
  bool is_quantifier() const { return op_ == Op::Forall || op_ == Op::Exists; }
  bool is_temporal() const {
    return op_ == Op::Next || op_ == Op::Always || op_ == Op::Sometime ||
           op_ == Op::Until || op_ == Op::Unless;
  }
  bool has_temporal() const { return has_temporal_; }
  // sorted free variables
  const std::vector<std::string>& free() const { return free_; }
  bool has_free(const std::string& v) const;

  struct Private;  // construction token
  Formula(const Private&, Op op, std::string name, std::vector<Term> args,
          std::vector<FormulaPtr> kids);

 private:
  Op op_;
  std::string name_;
  std::vector<Term> args_;
  std::vector<FormulaPtr> kids_;
  std::string key_;
  std::size_t size_ = 1;
  bool has_temporal_ = false;
  std::vector<std::string> free_;
};

// constructors
FormulaPtr atom(const std::string& pred, std::vector<Term> args = {});
FormulaPtr prop(const std::string& name);
FormulaPtr top();
FormulaPtr bottom();
FormulaPtr neg(FormulaPtr f);     // plain Not node
FormulaPtr negate(FormulaPtr f);  // cancels double negation and constants
FormulaPtr conj(std::vector<FormulaPtr> fs);
FormulaPtr disj(std::vector<FormulaPtr> fs);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr implies(FormulaPtr a, FormulaPtr b);
FormulaPtr iff(FormulaPtr a, FormulaPtr b);
FormulaPtr forall(const std::string& v, FormulaPtr f);
FormulaPtr exists(const std::string& v, FormulaPtr f);
FormulaPtr next(FormulaPtr f);
FormulaPtr always(FormulaPtr f);
FormulaPtr sometime(FormulaPtr f);
FormulaPtr until(FormulaPtr a, FormulaPtr b);
FormulaPtr unless(FormulaPtr a, FormulaPtr b);
FormulaPtr rebuild(const FormulaPtr& f, std::vector<FormulaPtr> kids);

std::string to_string(const FormulaPtr& f);
bool same(const FormulaPtr& a, const FormulaPtr& b);

struct FormulaKeyLess {
  bool operator()(const FormulaPtr& a, const FormulaPtr& b) const { return a->key() < b->key(); }
};

struct Signature {
  std::map<std::string, int> predicates;  // arity 0 = proposition
  std::set<std::string> constants;

  void add_predicate(const std::string& name, int arity);
  void add_constant(const std::string& name);
  void merge(const Signature& other);
  bool has(const std::string& name) const {
    return predicates.count(name) || constants.count(name);
  }
};

class SignatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void collect_signature(const FormulaPtr& f, Signature& sig);
Signature signature_of(const FormulaPtr& f);

std::set<std::string> free_vars(const FormulaPtr& f);
bool is_closed(const FormulaPtr& f);
std::set<std::string> constants_of(const FormulaPtr& f);
std::set<std::string> predicates_of(const FormulaPtr& f);

// capture-avoiding substitution of a term for a free variable
FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const Term& t);
// rename predicate symbols (the map sends old names to new ones)
FormulaPtr rename_predicates(const FormulaPtr& f, const std::map<std::string, std::string>& m);

FormulaPtr nnf(const FormulaPtr& f);
// pushes quantifiers inward as far as possible; input must be temporal-free
FormulaPtr miniscope(const FormulaPtr& f);

struct FormulaClass {
  bool is_monodic = true;
  bool is_closed = true;
  bool is_monadic = true;
  bool is_ground = true;
};
FormulaClass classify(const FormulaPtr& f);

// temporal nesting depth (number of nested temporal operators)
int temporal_depth(const FormulaPtr& f);

// a fresh variable name not in `avoid`
std::string fresh_var(const std::string& base, const std::set<std::string>& avoid);

}  // namespace mfotl
