#include "mfotl/problem.hpp"

#include <map>
#include <sstream>

namespace mfotl {

const char* to_string(Semantics s) { return s == Semantics::Constant ? "constant" : "expanding"; }

FormulaPtr Literal::formula(const std::string& var) const {
  FormulaPtr a = unary ? atom(pred, {Term::var(var)}) : prop(pred);
  return positive ? a : neg(a);
}

std::string Literal::key() const {
  return (positive ? "" : "~") + pred + (unary ? "(x)" : "");
}

bool as_literal(const FormulaPtr& f, Literal& out) {
  bool pos = true;
  FormulaPtr a = f;
  if (a->op() == Op::Not) {
    pos = false;
    a = a->kid(0);
  }
  if (!a->is_atom()) return false;
  if (a->args().empty()) {
    out = {a->name(), pos, false};
    return true;
  }
  if (a->args().size() == 1 && a->args()[0].is_var()) {
    out = {a->name(), pos, true};
    return true;
  }
  return false;
}

FormulaPtr StepClause::formula() const { return implies(lhs.formula(), next(rhs.formula())); }

std::string StepClause::key() const { return lhs.key() + " => next " + rhs.key(); }

Signature TemporalProblem::signature() const {
  Signature s;
  for (auto& f : initial) collect_signature(f, s);
  for (auto& f : universal) collect_signature(f, s);
  for (auto& c : step) {
    s.add_predicate(c.lhs.pred, c.lhs.unary ? 1 : 0);
    s.add_predicate(c.rhs.pred, c.rhs.unary ? 1 : 0);
  }
  for (auto& e : eventuality) s.add_predicate(e.lit.pred, e.lit.unary ? 1 : 0);
  return s;
}

std::vector<std::string> TemporalProblem::constants() const {
  auto s = signature();
  return {s.constants.begin(), s.constants.end()};
}

bool TemporalProblem::is_monadic() const {
  for (auto& [n, a] : signature().predicates)
    if (a > 1) return false;
  return true;
}

std::size_t TemporalProblem::size() const { return associated_formula(*this)->size(); }

FormulaPtr associated_formula(const TemporalProblem& p) {
  std::vector<FormulaPtr> parts = p.initial;
  if (!p.universal.empty()) parts.push_back(always(conj(p.universal)));
  std::vector<FormulaPtr> ng, g;
  for (auto& c : p.step) (c.ground() ? g : ng).push_back(c.formula());
  for (auto& e : p.eventuality) (e.ground() ? g : ng).push_back(sometime(e.lit.formula()));
  if (!g.empty()) parts.push_back(always(conj(g)));
  if (!ng.empty()) parts.push_back(always(forall("x", conj(ng))));
  return conj(parts);
}

std::vector<StepClause> non_ground_steps(const TemporalProblem& p) {
  std::vector<StepClause> out;
  for (auto& c : p.step)
    if (!c.ground()) out.push_back(c);
  return out;
}

std::vector<StepClause> ground_steps(const TemporalProblem& p) {
  std::vector<StepClause> out;
  for (auto& c : p.step)
    if (c.ground()) out.push_back(c);
  return out;
}

bool has_unique_lhs(const TemporalProblem& p) {
  std::set<Literal> seen;
  for (auto& c : p.step)
    if (!seen.insert(c.lhs).second) return false;
  return true;
}

void enforce_unique_lhs(TemporalProblem& p, RenamingLedger& ledger) {
  std::map<Literal, std::vector<Literal>> by_lhs;
  std::vector<Literal> order;
  for (auto& c : p.step) {
    auto& v = by_lhs[c.lhs];
    if (v.empty()) order.push_back(c.lhs);
    if (std::find(v.begin(), v.end(), c.rhs) == v.end()) v.push_back(c.rhs);
  }
  NameSupply names(p.signature());
  std::vector<StepClause> out;
  for (auto& l : order) {
    auto& rhs = by_lhs[l];
    if (rhs.size() == 1) {
      out.push_back({l, rhs[0]});
      continue;
    }
    std::vector<FormulaPtr> ms;
    for (auto& m : rhs) ms.push_back(m.formula());
    Literal n{names.numbered("_N"), true, l.unary};
    FormulaPtr def = implies(n.formula(), conj(ms));
    if (l.unary) def = forall("x", def);
    p.universal.push_back(def);
    ledger.add(n.pred, "fo-rename", def);
    out.push_back({l, n});
  }
  p.step = std::move(out);
}

NameSupply::NameSupply(const Signature& sig) { reserve(sig); }

void NameSupply::reserve(const Signature& sig) {
  for (auto& [n, a] : sig.predicates) used_.insert(n);
  for (auto& c : sig.constants) used_.insert(c);
}

std::string NameSupply::fresh(const std::string& base) {
  if (used_.insert(base).second) return base;
  for (int i = 1;; ++i) {
    std::string n = base + "_" + std::to_string(i);
    if (used_.insert(n).second) return n;
  }
}

std::string NameSupply::numbered(const std::string& prefix) {
  for (;;) {
    std::string n = prefix + std::to_string(++counter_);
    if (used_.insert(n).second) return n;
  }
}

std::string print_problem(const TemporalProblem& p, const RenamingLedger* ledger) {
  std::ostringstream os;
  if (p.semantics == Semantics::Expanding) os << "semantics expanding;\n";
  auto section = [&](const char* name, const std::vector<std::string>& lines) {
    os << name << " {\n";
    for (auto& l : lines) os << "  " << l << ";\n";
    os << "}\n";
  };
  std::vector<std::string> lines;
  for (auto& f : p.initial) lines.push_back(f->key());
  section("initial", lines);
  lines.clear();
  for (auto& f : p.universal) lines.push_back(f->key());
  section("universal", lines);
  lines.clear();
  for (auto& c : p.step) lines.push_back(c.key());
  section("step", lines);
  lines.clear();
  for (auto& e : p.eventuality) lines.push_back(e.key());
  section("eventuality", lines);
  if (ledger && !ledger->entries.empty()) {
    lines.clear();
    for (auto& e : ledger->entries)
      lines.push_back(e.name + " [" + e.origin + "] " + (e.definition ? e.definition->key() : ""));
    section("ledger", lines);
  }
  return os.str();
}

}  // namespace mfotl
