#include "mfotl/dsnf.hpp"

#include <algorithm>
#include <map>

namespace mfotl {

namespace {

FormulaPtr close_x(const FormulaPtr& f) { return f->free().empty() ? f : forall("x", f); }

// sometime sometime f = sometime f, always always f = always f
FormulaPtr collapse(const FormulaPtr& f) {
  if (!f->has_temporal()) return f;
  std::vector<FormulaPtr> ks;
  for (auto& k : f->kids()) ks.push_back(collapse(k));
  if ((f->op() == Op::Sometime || f->op() == Op::Always) && ks[0]->op() == f->op()) return ks[0];
  return rebuild(f, std::move(ks));
}

class Transformer {
 public:
  Transformer(const FormulaPtr& phi, Semantics sem) {
    out_.problem.semantics = sem;
    names_.reserve(signature_of(phi));
  }

  void run(const FormulaPtr& phi) {
    FormulaPtr f = collapse(nnf(phi));
    std::vector<FormulaPtr> parts = f->op() == Op::And ? f->kids() : std::vector<FormulaPtr>{f};
    for (auto& c : parts) {
      if (c->op() == Op::Always) universal(rename(c->kid(0)));
      else if (c->op() != Op::True) initial(rename(c));
    }
    for (std::size_t i = 0; i < work_.size(); ++i) define(work_[i].first, work_[i].second);
    enforce_unique_lhs(out_.problem, out_.ledger);
  }

  DsnfResult take() { return std::move(out_); }

 private:
  void initial(const FormulaPtr& f) { out_.problem.initial.push_back(f); }
  void universal(const FormulaPtr& f) {
    if (f->op() == Op::True) return;
    auto g = close_x(f);
    auto& u = out_.problem.universal;
    if (std::none_of(u.begin(), u.end(), [&](const FormulaPtr& h) { return same(h, g); })) u.push_back(g);
  }

  Literal fresh(const std::string& prefix, bool unary, const std::string& origin, const FormulaPtr& def) {
    Literal l{names_.numbered(prefix), true, unary};
    out_.ledger.add(l.pred, origin, def);
    return l;
  }
  Literal named(const std::string& base, bool unary, const std::string& origin, const FormulaPtr& def) {
    Literal l{names_.fresh(base), true, unary};
    out_.ledger.add(l.pred, origin, def);
    return l;
  }

  FormulaPtr rename(const FormulaPtr& f) {
    if (!f->has_temporal()) return f;
    std::vector<FormulaPtr> ks;
    for (auto& k : f->kids()) ks.push_back(rename(k));
    FormulaPtr g = rebuild(f, std::move(ks));
    if (!g->is_temporal()) return g;
    const auto& fv = g->free();
    if (fv.size() > 1) throw NotMonodic("temporal subformula with several free variables: " + g->key());
    std::string v = fv.empty() ? "" : fv[0];
    FormulaPtr body = v.empty() || v == "x" ? g : substitute(g, v, Term::var("x"));
    auto it = surrogates_.find(body->key());
    Literal s;
    if (it != surrogates_.end()) {
      s = it->second;
    } else {
      s = fresh("_S", !v.empty(), "surrogate", body);
      surrogates_.emplace(body->key(), s);
      work_.emplace_back(s, body);
    }
    return v.empty() ? s.formula() : s.formula(v);
  }

  // s => body, body temporal with first-order arguments
  void define(const Literal& s, const FormulaPtr& body) {
    FormulaPtr S = s.formula();
    switch (body->op()) {
      case Op::Next: step(s, body->kid(0)); break;
      case Op::Sometime: eventual(s, body->kid(0)); break;
      case Op::Always:
        // s itself is the fixpoint: s -> phi, s => next s
        universal(implies(S, body->kid(0)));
        out_.problem.step.push_back({s, s});
        break;
      case Op::Until:
      case Op::Unless: {
        // s -> b | (a & t), t => next s; for until also sometime ~t
        const FormulaPtr& a = body->kid(0);
        const FormulaPtr& b = body->kid(1);
        Literal t = fresh("_U", s.unary, "fixpoint", conj({a, negate(b), next(body)}));
        universal(implies(S, disj(b, conj(a, t.formula()))));
        out_.problem.step.push_back({t, s});
        if (body->op() == Op::Until) out_.problem.eventuality.push_back({t.negated()});
        break;
      }
      default: throw std::logic_error("not a temporal definition: " + body->key());
    }
  }

  Literal literal_for(const bool unary, const FormulaPtr& f) {
    Literal m;
    if (as_literal(f, m)) return m;
    Literal n = fresh("_N", unary, "fo-rename", f);
    universal(implies(n.formula(), f));
    return n;
  }

  void step(const Literal& s, const FormulaPtr& rhs) {
    if (rhs->op() == Op::True) return;
    if (rhs->op() == Op::False) {
      universal(negate(s.formula()));
      return;
    }
    out_.problem.step.push_back({s, literal_for(s.unary, rhs)});
  }

  // s => sometime arg
  void eventual(const Literal& s, const FormulaPtr& arg) {
    if (arg->op() == Op::True) return;
    if (arg->op() == Op::False) {
      universal(negate(s.formula()));
      return;
    }
    Literal l = literal_for(s.unary, arg);
    Literal w = named("_waitfor_" + std::string(l.positive ? "" : "not") + l.pred, s.unary, "waitfor",
                      sometime(l.formula()));
    // s means l | w, so it serves as the next-state literal of w
    universal(implies(s.formula(), disj(l.formula(), w.formula())));
    out_.problem.step.push_back({w, s});
    out_.problem.eventuality.push_back({w.negated()});
  }

  DsnfResult out_;
  NameSupply names_;
  std::map<std::string, Literal> surrogates_;
  std::vector<std::pair<Literal, FormulaPtr>> work_;
};

FormulaPtr ground_instance(const Literal& l, const std::string& c) {
  return substitute(l.formula("x"), "x", Term::constant(c));
}

}  // namespace

DsnfResult to_dsnf(const FormulaPtr& phi, Semantics sem) {
  if (!is_closed(phi)) throw std::invalid_argument("to_dsnf expects a closed formula");
  if (!classify(phi).is_monodic) throw NotMonodic("formula is not monodic");
  Transformer t(phi, sem);
  t.run(phi);
  return t.take();
}

TemporalProblem flood_constants(const TemporalProblem& p, RenamingLedger* ledger) {
  TemporalProblem q = p;
  q.flooded = true;
  auto consts = p.constants();
  if (consts.empty() || p.flooded) return q;
  NameSupply names(p.signature());
  for (auto& e : p.eventuality) {
    if (e.ground()) continue;
    for (auto& c : consts) {
      std::string l = names.numbered("_fl");
      FormulaPtr def = iff(prop(l), ground_instance(e.lit, c));
      q.universal.push_back(def);
      q.eventuality.push_back({{l, true, false}});
      if (ledger) ledger->add(l, "flood", def);
    }
  }
  return q;
}

std::string indexed_name(const std::string& pred, int i) { return pred + "^" + std::to_string(i); }

namespace {

int depth_of(const FormulaPtr& f, int d) {
  switch (f->op()) {
    case Op::Next: return depth_of(f->kid(0), d + 1);
    case Op::Always:
    case Op::Sometime:
    case Op::Until:
    case Op::Unless: throw std::invalid_argument("only next may occur in the extended part: " + f->key());
    case Op::Atom: return d;
    default: {
      int m = 0;
      for (auto& k : f->kids()) m = std::max(m, depth_of(k, d));
      return m;
    }
  }
}

// next^i P(t) -> P^i(t); next is pushed through connectives and quantifiers
FormulaPtr strip_next(const FormulaPtr& f, int d) {
  switch (f->op()) {
    case Op::Next: return strip_next(f->kid(0), d + 1);
    case Op::Atom: return atom(indexed_name(f->name(), d), f->args());
    case Op::True:
    case Op::False: return f;
    default: {
      std::vector<FormulaPtr> ks;
      for (auto& k : f->kids()) ks.push_back(strip_next(k, d));
      return rebuild(f, std::move(ks));
    }
  }
}

FormulaPtr at_index(const FormulaPtr& f, int i) {
  std::map<std::string, std::string> m;
  for (auto& p : predicates_of(f)) m[p] = indexed_name(p, i);
  return rename_predicates(f, m);
}

}  // namespace

int next_depth(const std::vector<FormulaPtr>& xs) {
  int k = 0;
  for (auto& x : xs) k = std::max(k, depth_of(x, 0));
  return k;
}

TemporalProblem reduce_extended(const ExtendedProblem& xp) {
  const TemporalProblem& p = xp.base;
  const int k = next_depth(xp.extended);
  Signature sig = p.signature();
  for (auto& x : xp.extended) collect_signature(x, sig);

  TemporalProblem q = p;
  q.initial.clear();
  for (auto& f : p.initial) q.initial.push_back(at_index(f, 0));
  for (auto& f : p.universal)
    for (int i = 0; i <= k; ++i) q.initial.push_back(at_index(f, i));
  for (auto& c : p.step)
    for (int i = 0; i < k; ++i)
      q.initial.push_back(close_x(implies(at_index(c.lhs.formula(), i), at_index(c.rhs.formula(), i + 1))));
  for (auto& x : xp.extended) q.initial.push_back(strip_next(x, 0));
  for (auto& [pred, arity] : sig.predicates) {
    std::vector<Term> args;
    std::vector<std::string> vars;
    for (int j = 0; j < arity; ++j) {
      static const char* base[] = {"x", "y", "z"};
      vars.push_back(j < 3 ? base[j] : "x" + std::to_string(j + 1));
      args.push_back(Term::var(vars.back()));
    }
    FormulaPtr eq = iff(atom(pred, args), atom(indexed_name(pred, k), args));
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) eq = forall(*it, eq);
    q.initial.push_back(eq);
  }
  return q;
}

TemporalProblem reduce_ground_eventuality(const TemporalProblem& p, RenamingLedger* ledger, GroundingOptions opt) {
  for (auto& e : p.eventuality)
    if (!e.ground()) throw std::invalid_argument("reduce_ground_eventuality: non-ground eventuality " + e.key());
  auto ng = non_ground_steps(p);
  if (ng.empty()) return p;
  if (ng.size() >= 20) throw ResourceLimit("too many non-ground step clauses to ground");
  const bool expanding = p.semantics == Semantics::Expanding;
  auto consts = p.constants();
  std::size_t subsets = (std::size_t(1) << ng.size()) - 1;
  std::size_t total = subsets * (expanding ? 1 : 2) + ng.size() * consts.size();
  if (total > opt.max_clauses)
    throw ResourceLimit("grounding needs " + std::to_string(total) + " clauses, cap " +
                        std::to_string(opt.max_clauses));

  TemporalProblem q = p;
  q.step = ground_steps(p);
  NameSupply names(p.signature());
  std::map<std::string, Literal> renamed;
  RenamingLedger local;
  auto side = [&](const FormulaPtr& f) {
    auto it = renamed.find(f->key());
    if (it != renamed.end()) return it->second;
    Literal g{names.numbered("_g"), true, false};
    FormulaPtr def = iff(prop(g.pred), f);
    q.universal.push_back(def);
    (ledger ? *ledger : local).add(g.pred, "ground", def);
    renamed.emplace(f->key(), g);
    return g;
  };
  auto add = [&](const FormulaPtr& l, const FormulaPtr& r) { q.step.push_back({side(l), side(r)}); };

  for (std::size_t mask = 1; mask <= subsets; ++mask) {
    std::vector<FormulaPtr> ls, rs;
    for (std::size_t j = 0; j < ng.size(); ++j)
      if ((mask >> j) & 1u) {
        ls.push_back(ng[j].lhs.formula());
        rs.push_back(ng[j].rhs.formula());
      }
    add(exists("x", conj(ls)), exists("x", conj(rs)));
    if (!expanding) add(forall("x", disj(ls)), forall("x", disj(rs)));
  }
  for (auto& c : ng)
    for (auto& k : consts) add(ground_instance(c.lhs, k), ground_instance(c.rhs, k));
  enforce_unique_lhs(q, ledger ? *ledger : local);
  return q;
}

TemporalProblem reduce_ground_next_time(const TemporalProblem& p, RenamingLedger* ledger) {
  for (auto& c : p.step)
    if (!c.ground()) throw std::invalid_argument("reduce_ground_next_time: non-ground step clause " + c.key());
  TemporalProblem q = p;
  q.eventuality.clear();
  q.flooded = true;
  NameSupply names(p.signature());
  auto consts = p.constants();
  for (auto& e : p.eventuality) {
    if (e.ground()) {
      q.eventuality.push_back(e);
      continue;
    }
    std::string n = names.numbered("_ex");
    FormulaPtr def = iff(prop(n), exists("x", e.lit.formula("x")));
    q.universal.push_back(def);
    q.eventuality.push_back({{n, true, false}});
    if (ledger) ledger->add(n, "ground", def);
  }
  for (auto& e : p.eventuality) {
    if (e.ground()) continue;
    for (auto& c : consts) {
      std::string l = names.numbered("_fl");
      FormulaPtr def = iff(prop(l), ground_instance(e.lit, c));
      q.universal.push_back(def);
      q.eventuality.push_back({{l, true, false}});
      if (ledger) ledger->add(l, "flood", def);
    }
  }
  return q;
}

}  // namespace mfotl
