#pragma once

// Shared helpers for the test binaries: concrete finite models, brute-force
// satisfiability, and random formula generators.

#include <algorithm>
#include <functional>
#include <optional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mfotl/formula.hpp"
#include "mfotl/problem.hpp"

namespace testsupport {

using namespace mfotl;

// A finite first-order structure with elements 0..n-1.
struct Concrete {
  int n = 1;
  std::map<std::string, std::vector<bool>> unary;  // pred -> extension
  std::map<std::string, bool> props;
  std::map<std::string, int> consts;
};

inline bool ceval(const Concrete& m, const FormulaPtr& f, std::map<std::string, int>& env) {
  switch (f->op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: {
      if (f->args().empty()) return m.props.at(f->name());
      const Term& t = f->args()[0];
      int d = t.is_var() ? env.at(t.name) : m.consts.at(t.name);
      return m.unary.at(f->name())[d];
    }
    case Op::Not: return !ceval(m, f->kid(0), env);
    case Op::And:
      for (auto& k : f->kids())
        if (!ceval(m, k, env)) return false;
      return true;
    case Op::Or:
      for (auto& k : f->kids())
        if (ceval(m, k, env)) return true;
      return false;
    case Op::Implies: return !ceval(m, f->kid(0), env) || ceval(m, f->kid(1), env);
    case Op::Iff: return ceval(m, f->kid(0), env) == ceval(m, f->kid(1), env);
    case Op::Forall:
    case Op::Exists: {
      bool all = f->op() == Op::Forall;
      auto saved = env.count(f->name()) ? std::optional<int>(env[f->name()]) : std::nullopt;
      bool res = all;
      for (int d = 0; d < m.n; ++d) {
        env[f->name()] = d;
        if (ceval(m, f->kid(0), env) != all) {
          res = !all;
          break;
        }
      }
      if (saved) env[f->name()] = *saved;
      else env.erase(f->name());
      return res;
    }
    default: throw std::invalid_argument("temporal formula in concrete evaluation");
  }
}

inline bool ceval(const Concrete& m, const FormulaPtr& f) {
  std::map<std::string, int> env;
  return ceval(m, f, env);
}

// Calls fn on every structure with the given symbols and domain size; stops when fn returns true.
inline bool for_each_concrete(int n, const std::vector<std::string>& preds, const std::vector<std::string>& props,
                              const std::vector<std::string>& consts,
                              const std::function<bool(const Concrete&)>& fn) {
  const std::size_t bits = preds.size() * n + props.size();
  std::size_t cmaps = 1;
  for (std::size_t i = 0; i < consts.size(); ++i) cmaps *= n;
  Concrete m;
  m.n = n;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << bits); ++mask) {
    std::size_t b = 0;
    for (auto& p : preds) {
      auto& ext = m.unary[p];
      ext.assign(n, false);
      for (int d = 0; d < n; ++d) ext[d] = (mask >> b++) & 1u;
    }
    for (auto& p : props) m.props[p] = (mask >> b++) & 1u;
    for (std::size_t cm = 0; cm < cmaps; ++cm) {
      std::size_t r = cm;
      for (auto& c : consts) {
        m.consts[c] = static_cast<int>(r % n);
        r /= n;
      }
      if (fn(m)) return true;
    }
  }
  return false;
}

inline bool brute_force_sat(const std::vector<FormulaPtr>& fs, int max_n) {
  Signature sig;
  for (auto& f : fs) collect_signature(f, sig);
  std::vector<std::string> preds, props, consts(sig.constants.begin(), sig.constants.end());
  for (auto& [p, a] : sig.predicates) (a == 0 ? props : preds).push_back(p);
  for (int n = 1; n <= max_n; ++n) {
    bool found = for_each_concrete(n, preds, props, consts, [&](const Concrete& m) {
      for (auto& f : fs)
        if (!ceval(m, f)) return false;
      return true;
    });
    if (found) return true;
  }
  return false;
}

// Random closed monadic sentence over P,Q,R (unary), p,q (props), constant c.
struct SentenceGen {
  std::mt19937 rng;
  int npreds = 3, nprops = 2;
  bool use_const = true;
  explicit SentenceGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  FormulaPtr atom_in(const std::vector<std::string>& vars) {
    static const char* P[] = {"P", "Q", "R"};
    static const char* p[] = {"p", "q"};
    int choice = pick(10);
    if (choice < 2 && nprops > 0) return prop(p[pick(nprops)]);
    if (choice < 4 && use_const) return atom(P[pick(npreds)], {Term::constant("c")});
    if (vars.empty()) return use_const ? atom(P[pick(npreds)], {Term::constant("c")}) : prop(p[pick(std::max(1, nprops))]);
    return atom(P[pick(npreds)], {Term::var(vars[pick(static_cast<int>(vars.size()))])});
  }

  FormulaPtr gen(int depth, std::vector<std::string>& vars) {
    if (depth == 0) return pick(2) ? atom_in(vars) : neg(atom_in(vars));
    switch (pick(9)) {
      case 0: return neg(gen(depth - 1, vars));
      case 1: case 2: return conj(gen(depth - 1, vars), gen(depth - 1, vars));
      case 3: case 4: return disj(gen(depth - 1, vars), gen(depth - 1, vars));
      case 5: return implies(gen(depth - 1, vars), gen(depth - 1, vars));
      case 6: case 7: case 8: {
        std::string v = vars.size() % 2 ? "y" : "x";
        if (std::find(vars.begin(), vars.end(), v) != vars.end()) v += std::to_string(vars.size());
        vars.push_back(v);
        FormulaPtr b = gen(depth - 1, vars);
        vars.pop_back();
        return pick(2) ? forall(v, b) : exists(v, b);
      }
    }
    return top();
  }

  FormulaPtr sentence(int depth) {
    std::vector<std::string> vars;
    return gen(depth, vars);
  }
};

// Random closed monodic temporal formula over P, Q (unary), p, q and constant c.
struct TemporalGen {
  std::mt19937 rng;
  bool use_const = true;
  explicit TemporalGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  FormulaPtr leaf(const std::string& var) {
    int k = pick(8);
    if (k < 2) return prop(k ? "p" : "q");
    if (k < 3 && use_const) return atom(pick(2) ? "P" : "Q", {Term::constant("c")});
    if (var.empty()) return prop("p");
    return atom(pick(2) ? "P" : "Q", {Term::var(var)});
  }

  // at most one free variable below a temporal operator keeps it monodic
  FormulaPtr gen(int depth, const std::string& var) {
    if (depth == 0) return pick(3) ? leaf(var) : neg(leaf(var));
    switch (pick(12)) {
      case 0: return neg(gen(depth - 1, var));
      case 1: case 2: return conj(gen(depth - 1, var), gen(depth - 1, var));
      case 3: return disj(gen(depth - 1, var), gen(depth - 1, var));
      case 4: return implies(gen(depth - 1, var), gen(depth - 1, var));
      case 5: return next(gen(depth - 1, var));
      case 6: return always(gen(depth - 1, var));
      case 7: return sometime(gen(depth - 1, var));
      case 8: return pick(2) ? until(gen(depth - 1, var), gen(depth - 1, var))
                             : unless(gen(depth - 1, var), gen(depth - 1, var));
      default: {
        if (!var.empty()) return pick(2) ? next(gen(depth - 1, var)) : conj(gen(depth - 1, var), leaf(var));
        FormulaPtr b = gen(depth - 1, "x");
        return pick(2) ? forall("x", b) : exists("x", b);
      }
    }
  }

  FormulaPtr sentence(int depth) { return gen(depth, ""); }
};

// Random monadic temporal problem: P, Q unary, p, q propositions, at most one
// constant, up to 3 step clauses and 2 eventualities.
struct ProblemGen {
  std::mt19937 rng;
  explicit ProblemGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Literal literal(bool unary, int npreds, int nprops) {
    static const char* P[] = {"P", "Q"};
    static const char* p[] = {"p", "q"};
    Literal l;
    l.unary = unary;
    l.pred = unary ? P[pick(npreds)] : p[pick(nprops)];
    l.positive = pick(2);
    return l;
  }

  TemporalProblem problem(Semantics sem = Semantics::Constant) {
    TemporalProblem t;
    t.semantics = sem;
    int npreds = 1 + pick(2), nprops = pick(3);
    SentenceGen g(static_cast<unsigned>(rng()));
    g.npreds = npreds;
    g.nprops = nprops;
    g.use_const = pick(3) == 0;
    for (int i = pick(3); i > 0; --i) t.universal.push_back(g.sentence(1 + pick(2)));
    for (int i = pick(3); i > 0; --i) t.initial.push_back(g.sentence(1 + pick(2)));
    for (int i = 1 + pick(3); i > 0; --i) {
      bool unary = nprops == 0 || pick(3) > 0;
      t.step.push_back({literal(unary, npreds, nprops), literal(unary, npreds, nprops)});
    }
    for (int i = pick(3); i > 0; --i) {
      bool unary = nprops == 0 || pick(2) > 0;
      t.eventuality.push_back({literal(unary, npreds, nprops)});
    }
    return t;
  }
};

}  // namespace testsupport
