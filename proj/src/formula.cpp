#include "mfotl/formula.hpp"

#include <algorithm>

namespace mfotl {

struct Formula::Private {};

namespace {

int prec(Op op) {
  switch (op) {
    case Op::Forall: case Op::Exists: return 0;
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Until: case Op::Unless: return 5;
    case Op::Not: case Op::Next: case Op::Always: case Op::Sometime: return 6;
    default: return 7;
  }
}

std::string wrap(const FormulaPtr& k, bool paren) {
  return paren ? "(" + k->key() + ")" : k->key();
}

std::string make_key(Op op, const std::string& name, const std::vector<Term>& args,
                     const std::vector<FormulaPtr>& kids) {
  switch (op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: {
      if (args.empty()) return name;
      std::string s = name + "(";
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) s += ",";
        s += args[i].name;
      }
      return s + ")";
    }
    case Op::Not: return "~" + wrap(kids[0], prec(kids[0]->op()) < 6);
    case Op::Next: return "next " + wrap(kids[0], prec(kids[0]->op()) < 6);
    case Op::Always: return "always " + wrap(kids[0], prec(kids[0]->op()) < 6);
    case Op::Sometime: return "sometime " + wrap(kids[0], prec(kids[0]->op()) < 6);
    case Op::And:
    case Op::Or: {
      int p = prec(op);
      std::string s;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i) s += op == Op::And ? " & " : " | ";
        s += wrap(kids[i], prec(kids[i]->op()) <= p);
      }
      return s;
    }
    case Op::Implies:
      return wrap(kids[0], prec(kids[0]->op()) <= 2) + " -> " +
             wrap(kids[1], prec(kids[1]->op()) < 2);
    case Op::Iff:
      return wrap(kids[0], prec(kids[0]->op()) <= 1) + " <-> " +
             wrap(kids[1], prec(kids[1]->op()) <= 1);
    case Op::Until:
    case Op::Unless:
      return wrap(kids[0], prec(kids[0]->op()) <= 5) +
             (op == Op::Until ? " until " : " unless ") +
             wrap(kids[1], prec(kids[1]->op()) <= 5);
    case Op::Forall: return "forall " + name + ". " + kids[0]->key();
    case Op::Exists: return "exists " + name + ". " + kids[0]->key();
  }
  return "?";
}

FormulaPtr make(Op op, std::string name = {}, std::vector<Term> args = {},
                std::vector<FormulaPtr> kids = {}) {
  return std::make_shared<const Formula>(Formula::Private{}, op, std::move(name), std::move(args),
                                         std::move(kids));
}

FormulaPtr nary(Op op, std::vector<FormulaPtr> fs) {
  const Op unit = op == Op::And ? Op::True : Op::False;
  const Op zero = op == Op::And ? Op::False : Op::True;
  std::vector<FormulaPtr> flat;
  for (auto& f : fs) {
    if (f->op() == unit) continue;
    if (f->op() == zero) return f;
    if (f->op() == op) {
      for (auto& k : f->kids()) flat.push_back(k);
    } else {
      flat.push_back(f);
    }
  }
  std::sort(flat.begin(), flat.end(), FormulaKeyLess{});
  flat.erase(std::unique(flat.begin(), flat.end(),
                         [](const FormulaPtr& a, const FormulaPtr& b) { return a->key() == b->key(); }),
             flat.end());
  if (flat.empty()) return unit == Op::True ? top() : bottom();
  if (flat.size() == 1) return flat[0];
  return make(op, {}, {}, std::move(flat));
}

}  // namespace

Formula::Formula(const Private&, Op op, std::string name, std::vector<Term> args,
                 std::vector<FormulaPtr> kids)
    : op_(op), name_(std::move(name)), args_(std::move(args)), kids_(std::move(kids)) {
  key_ = make_key(op_, name_, args_, kids_);
  has_temporal_ = is_temporal();
  std::set<std::string> fv;
  for (auto& t : args_)
    if (t.is_var()) fv.insert(t.name);
  for (auto& k : kids_) {
    size_ += k->size();
    has_temporal_ = has_temporal_ || k->has_temporal();
    fv.insert(k->free().begin(), k->free().end());
  }
  if (is_quantifier()) fv.erase(name_);
  free_.assign(fv.begin(), fv.end());
}

bool Formula::has_free(const std::string& v) const {
  return std::binary_search(free_.begin(), free_.end(), v);
}

FormulaPtr atom(const std::string& pred, std::vector<Term> args) {
  return make(Op::Atom, pred, std::move(args));
}
FormulaPtr prop(const std::string& name) { return make(Op::Atom, name); }
FormulaPtr top() {
  static const FormulaPtr t = make(Op::True);
  return t;
}
FormulaPtr bottom() {
  static const FormulaPtr f = make(Op::False);
  return f;
}
FormulaPtr neg(FormulaPtr f) { return make(Op::Not, {}, {}, {std::move(f)}); }
FormulaPtr negate(FormulaPtr f) {
  if (f->op() == Op::True) return bottom();
  if (f->op() == Op::False) return top();
  if (f->op() == Op::Not) return f->kid(0);
  return neg(std::move(f));
}
FormulaPtr conj(std::vector<FormulaPtr> fs) { return nary(Op::And, std::move(fs)); }
FormulaPtr disj(std::vector<FormulaPtr> fs) { return nary(Op::Or, std::move(fs)); }
FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return conj(std::vector<FormulaPtr>{std::move(a), std::move(b)}); }
FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return disj(std::vector<FormulaPtr>{std::move(a), std::move(b)}); }
FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return make(Op::Implies, {}, {}, {std::move(a), std::move(b)}); }
FormulaPtr iff(FormulaPtr a, FormulaPtr b) { return make(Op::Iff, {}, {}, {std::move(a), std::move(b)}); }
FormulaPtr forall(const std::string& v, FormulaPtr f) { return make(Op::Forall, v, {}, {std::move(f)}); }
FormulaPtr exists(const std::string& v, FormulaPtr f) { return make(Op::Exists, v, {}, {std::move(f)}); }
FormulaPtr next(FormulaPtr f) { return make(Op::Next, {}, {}, {std::move(f)}); }
FormulaPtr always(FormulaPtr f) { return make(Op::Always, {}, {}, {std::move(f)}); }
FormulaPtr sometime(FormulaPtr f) { return make(Op::Sometime, {}, {}, {std::move(f)}); }
FormulaPtr until(FormulaPtr a, FormulaPtr b) { return make(Op::Until, {}, {}, {std::move(a), std::move(b)}); }
FormulaPtr unless(FormulaPtr a, FormulaPtr b) { return make(Op::Unless, {}, {}, {std::move(a), std::move(b)}); }

FormulaPtr rebuild(const FormulaPtr& f, std::vector<FormulaPtr> kids) {
  switch (f->op()) {
    case Op::And: return conj(std::move(kids));
    case Op::Or: return disj(std::move(kids));
    case Op::Atom: case Op::True: case Op::False: return f;
    default: break;
  }
  bool changed = false;
  for (std::size_t i = 0; i < kids.size(); ++i) changed = changed || kids[i] != f->kids()[i];
  if (!changed) return f;
  return make(f->op(), f->name(), f->args(), std::move(kids));
}

std::string to_string(const FormulaPtr& f) { return f->key(); }
bool same(const FormulaPtr& a, const FormulaPtr& b) { return a->key() == b->key(); }

void Signature::add_predicate(const std::string& name, int arity) {
  if (constants.count(name)) throw SignatureError("symbol '" + name + "' used as constant and predicate");
  auto [it, inserted] = predicates.emplace(name, arity);
  if (!inserted && it->second != arity)
    throw SignatureError("arity mismatch for '" + name + "': " + std::to_string(it->second) +
                         " vs " + std::to_string(arity));
}

void Signature::add_constant(const std::string& name) {
  if (predicates.count(name)) throw SignatureError("symbol '" + name + "' used as constant and predicate");
  constants.insert(name);
}

void Signature::merge(const Signature& other) {
  for (auto& [n, a] : other.predicates) add_predicate(n, a);
  for (auto& c : other.constants) add_constant(c);
}

void collect_signature(const FormulaPtr& f, Signature& sig) {
  if (f->is_atom()) {
    sig.add_predicate(f->name(), static_cast<int>(f->args().size()));
    for (auto& t : f->args())
      if (!t.is_var()) sig.add_constant(t.name);
    return;
  }
  for (auto& k : f->kids()) collect_signature(k, sig);
}

Signature signature_of(const FormulaPtr& f) {
  Signature s;
  collect_signature(f, s);
  return s;
}

std::set<std::string> free_vars(const FormulaPtr& f) { return {f->free().begin(), f->free().end()}; }
bool is_closed(const FormulaPtr& f) { return f->free().empty(); }

std::set<std::string> constants_of(const FormulaPtr& f) { return signature_of(f).constants; }

std::set<std::string> predicates_of(const FormulaPtr& f) {
  std::set<std::string> out;
  for (auto& [n, a] : signature_of(f).predicates) out.insert(n);
  return out;
}

std::string fresh_var(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string c = base + std::to_string(i);
    if (!avoid.count(c)) return c;
  }
}

FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const Term& t) {
  if (!f->has_free(var)) return f;
  if (f->is_atom()) {
    auto args = f->args();
    for (auto& a : args)
      if (a.is_var() && a.name == var) a = t;
    return atom(f->name(), std::move(args));
  }
  if (f->is_quantifier()) {
    std::string v = f->name();
    FormulaPtr body = f->kid(0);
    if (t.is_var() && t.name == v) {
      auto avoid = free_vars(body);
      avoid.insert(t.name);
      avoid.insert(var);
      std::string nv = fresh_var(v, avoid);
      body = substitute(body, v, Term::var(nv));
      v = nv;
    }
    body = substitute(body, var, t);
    return f->op() == Op::Forall ? forall(v, body) : exists(v, body);
  }
  std::vector<FormulaPtr> kids;
  for (auto& k : f->kids()) kids.push_back(substitute(k, var, t));
  return rebuild(f, std::move(kids));
}

FormulaPtr rename_predicates(const FormulaPtr& f, const std::map<std::string, std::string>& m) {
  if (f->is_atom()) {
    auto it = m.find(f->name());
    return it == m.end() ? f : atom(it->second, f->args());
  }
  if (f->kids().empty()) return f;
  std::vector<FormulaPtr> kids;
  for (auto& k : f->kids()) kids.push_back(rename_predicates(k, m));
  return rebuild(f, std::move(kids));
}

namespace {

FormulaPtr push(const FormulaPtr& f, bool pos) {
  switch (f->op()) {
    case Op::Atom: return pos ? f : neg(f);
    case Op::True: return pos ? top() : bottom();
    case Op::False: return pos ? bottom() : top();
    case Op::Not: return push(f->kid(0), !pos);
    case Op::And:
    case Op::Or: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids()) ks.push_back(push(k, pos));
      return (f->op() == Op::And) == pos ? conj(ks) : disj(ks);
    }
    case Op::Implies:
      if (pos) return disj(push(f->kid(0), false), push(f->kid(1), true));
      return conj(push(f->kid(0), true), push(f->kid(1), false));
    case Op::Iff:
      return push(conj(implies(f->kid(0), f->kid(1)), implies(f->kid(1), f->kid(0))), pos);
    case Op::Forall:
    case Op::Exists: {
      auto b = push(f->kid(0), pos);
      return (f->op() == Op::Forall) == pos ? forall(f->name(), b) : exists(f->name(), b);
    }
    case Op::Next: return next(push(f->kid(0), pos));
    case Op::Always: return pos ? always(push(f->kid(0), true)) : sometime(push(f->kid(0), false));
    case Op::Sometime: return pos ? sometime(push(f->kid(0), true)) : always(push(f->kid(0), false));
    case Op::Until:
    case Op::Unless: {
      if (pos) {
        auto a = push(f->kid(0), true), b = push(f->kid(1), true);
        return f->op() == Op::Until ? until(a, b) : unless(a, b);
      }
      auto na = push(f->kid(0), false), nb = push(f->kid(1), false);
      return f->op() == Op::Until ? unless(nb, conj(na, nb)) : until(nb, conj(na, nb));
    }
  }
  return f;
}

FormulaPtr mini(const FormulaPtr& f);

FormulaPtr mini_quant(Op q, const std::string& x, const FormulaPtr& body) {
  if (!body->has_free(x)) return body;
  const Op spread = q == Op::Forall ? Op::And : Op::Or;
  const Op split = q == Op::Forall ? Op::Or : Op::And;
  auto mk = [&](const FormulaPtr& b) { return q == Op::Forall ? forall(x, b) : exists(x, b); };
  if (body->op() == spread) {
    std::vector<FormulaPtr> ks;
    for (auto& k : body->kids()) ks.push_back(mini_quant(q, x, k));
    return spread == Op::And ? conj(ks) : disj(ks);
  }
  if (body->op() == split) {
    std::vector<FormulaPtr> with, without;
    for (auto& k : body->kids()) (k->has_free(x) ? with : without).push_back(k);
    if (!without.empty()) {
      auto inner = split == Op::Or ? disj(with) : conj(with);
      without.push_back(mini_quant(q, x, inner));
      return split == Op::Or ? disj(without) : conj(without);
    }
  }
  return mk(body);
}

FormulaPtr mini(const FormulaPtr& f) {
  switch (f->op()) {
    case Op::And: case Op::Or: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids()) ks.push_back(mini(k));
      return f->op() == Op::And ? conj(ks) : disj(ks);
    }
    case Op::Forall: case Op::Exists:
      return mini_quant(f->op(), f->name(), mini(f->kid(0)));
    default: return f;
  }
}

void classify_rec(const FormulaPtr& f, bool under_quant, FormulaClass& c) {
  if (f->is_atom() && f->args().size() > 1) c.is_monadic = false;
  if (f->is_temporal()) {
    if (f->free().size() > 1) c.is_monodic = false;
    if (under_quant) c.is_ground = false;
  }
  bool q = under_quant || f->is_quantifier();
  for (auto& k : f->kids()) classify_rec(k, q, c);
}

}  // namespace

FormulaPtr nnf(const FormulaPtr& f) { return push(f, true); }

FormulaPtr miniscope(const FormulaPtr& f) {
  if (f->has_temporal()) throw std::invalid_argument("miniscope expects a first-order formula");
  return mini(nnf(f));
}

FormulaClass classify(const FormulaPtr& f) {
  FormulaClass c;
  c.is_closed = f->free().empty();
  classify_rec(f, false, c);
  if (!c.is_closed) c.is_ground = false;
  return c;
}

int temporal_depth(const FormulaPtr& f) {
  int d = 0;
  for (auto& k : f->kids()) d = std::max(d, temporal_depth(k));
  return d + (f->is_temporal() ? 1 : 0);
}

}  // namespace mfotl
