#include "mfotl/oracle.hpp"

#include <algorithm>
#include <sstream>

#include "mfotl/sat.hpp"

namespace mfotl {

int AbstractStructure::index_of(const std::string& pred) const {
  auto it = std::find(predicates.begin(), predicates.end(), pred);
  return it == predicates.end() ? -1 : static_cast<int>(it - predicates.begin());
}

std::string AbstractStructure::describe() const {
  std::ostringstream os;
  auto colour = [&](Colour c) {
    std::string s = "[";
    for (std::size_t i = 0; i < predicates.size(); ++i) {
      if (i) s += ",";
      s += ((c >> i) & 1u) ? "" : "~";
      s += predicates[i];
    }
    return s + "]";
  };
  os << "colours {";
  for (std::size_t i = 0; i < colours.size(); ++i) os << (i ? " " : "") << colour(colours[i]);
  os << "} props {";
  bool first = true;
  for (auto& [p, v] : props) {
    os << (first ? "" : " ") << (v ? "" : "~") << p;
    first = false;
  }
  os << "} constants {";
  first = true;
  for (auto& [c, col] : constant_colour) {
    os << (first ? "" : " ") << c << "=" << colour(col);
    first = false;
  }
  os << "}";
  return os.str();
}

namespace {

using Env = std::vector<std::pair<std::string, Colour>>;

Colour lookup(const Env& env, const std::string& v) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == v) return it->second;
  throw std::invalid_argument("unbound variable " + v);
}

bool eval(const AbstractStructure& s, const FormulaPtr& f, Env& env) {
  switch (f->op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: {
      if (f->args().empty()) {
        auto it = s.props.find(f->name());
        if (it == s.props.end()) throw std::invalid_argument("unknown proposition " + f->name());
        return it->second;
      }
      if (f->args().size() > 1) throw FragmentUnsupported(f->name());
      int i = s.index_of(f->name());
      if (i < 0) throw std::invalid_argument("unknown predicate " + f->name());
      const Term& t = f->args()[0];
      Colour c;
      if (t.is_var()) {
        c = lookup(env, t.name);
      } else {
        auto it = s.constant_colour.find(t.name);
        if (it == s.constant_colour.end()) throw std::invalid_argument("unknown constant " + t.name);
        c = it->second;
      }
      return (c >> i) & 1u;
    }
    case Op::Not: return !eval(s, f->kid(0), env);
    case Op::And:
      for (auto& k : f->kids())
        if (!eval(s, k, env)) return false;
      return true;
    case Op::Or:
      for (auto& k : f->kids())
        if (eval(s, k, env)) return true;
      return false;
    case Op::Implies: return !eval(s, f->kid(0), env) || eval(s, f->kid(1), env);
    case Op::Iff: return eval(s, f->kid(0), env) == eval(s, f->kid(1), env);
    case Op::Forall:
    case Op::Exists: {
      bool all = f->op() == Op::Forall;
      for (Colour c : s.colours) {
        env.emplace_back(f->name(), c);
        bool v = eval(s, f->kid(0), env);
        env.pop_back();
        if (v != all) return !all;
      }
      return all;
    }
    default: throw std::invalid_argument("temporal operator in first-order evaluation: " + f->key());
  }
}

void check_fragment(const FormulaPtr& f) {
  if (f->is_temporal()) throw std::invalid_argument("temporal operator in oracle query: " + f->key());
  if (f->is_atom() && f->args().size() > 1) throw FragmentUnsupported(f->name());
  for (auto& k : f->kids()) check_fragment(k);
}

class Encoder {
 public:
  explicit Encoder(const std::vector<FormulaPtr>& sentences) {
    Signature sig;
    for (auto& f : sentences) {
      check_fragment(f);
      if (!f->free().empty()) throw std::invalid_argument("oracle query not closed: " + f->key());
      collect_signature(f, sig);
    }
    for (auto& [n, a] : sig.predicates) (a == 0 ? props_ : preds_).push_back(n);
    consts_.assign(sig.constants.begin(), sig.constants.end());
    if (preds_.size() > 16) throw OracleBudgetExceeded("oracle query has more than 16 unary predicates");
    T_ = solver_.new_var();
    solver_.add_clause({T_});
    ncol_ = Colour(1) << preds_.size();
    std::vector<int> nonempty;
    for (Colour g = 0; g < ncol_; ++g) {
      in_.push_back(solver_.new_var());
      nonempty.push_back(in_.back());
    }
    solver_.add_clause(nonempty);
    for (auto& p : props_) propvar_[p] = solver_.new_var();
    for (auto& c : consts_) {
      auto& v = constvar_[c];
      for (std::size_t i = 0; i < preds_.size(); ++i) v.push_back(solver_.new_var());
      for (Colour g = 0; g < ncol_; ++g) {
        std::vector<int> cl{in_[g]};
        for (std::size_t i = 0; i < preds_.size(); ++i) cl.push_back(((g >> i) & 1u) ? -v[i] : v[i]);
        solver_.add_clause(cl);
      }
    }
    for (auto& f : sentences) solver_.add_clause({enc(miniscope(f))});
  }

  bool solve() { return solver_.solve(); }

  AbstractStructure structure() const {
    AbstractStructure s;
    s.predicates = preds_;
    for (Colour g = 0; g < ncol_; ++g)
      if (solver_.value(in_[g])) s.colours.push_back(g);
    for (auto& [p, v] : propvar_) s.props[p] = solver_.value(v);
    for (auto& [c, vs] : constvar_) {
      Colour g = 0;
      for (std::size_t i = 0; i < vs.size(); ++i)
        if (solver_.value(vs[i])) g |= Colour(1) << i;
      s.constant_colour[c] = g;
    }
    return s;
  }

 private:
  int mk_and(std::vector<int> ls) {
    std::vector<int> keep;
    for (int l : ls) {
      if (l == -T_) return -T_;
      if (l != T_) keep.push_back(l);
    }
    if (keep.empty()) return T_;
    if (keep.size() == 1) return keep[0];
    int g = solver_.new_var();
    std::vector<int> back{g};
    for (int l : keep) {
      solver_.add_clause({-g, l});
      back.push_back(-l);
    }
    solver_.add_clause(back);
    return g;
  }
  int mk_or(std::vector<int> ls) {
    for (int& l : ls) l = -l;
    return -mk_and(std::move(ls));
  }

  int enc(const FormulaPtr& f) {
    const auto& fv = f->free();
    if (fv.size() > 4) return enc_raw(f);
    // node address plus up to four 16-bit colours of its free variables
    std::uint64_t env = 0;
    for (auto& v : fv) env = (env << 16) | lookup(env_, v);
    Key key{f.get(), env};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    int r = enc_raw(f);
    memo_.emplace(key, r);
    keep_.push_back(f);
    return r;
  }

  int enc_raw(const FormulaPtr& f) {
    switch (f->op()) {
      case Op::True: return T_;
      case Op::False: return -T_;
      case Op::Atom: {
        if (f->args().empty()) return propvar_.at(f->name());
        int i = static_cast<int>(std::find(preds_.begin(), preds_.end(), f->name()) - preds_.begin());
        const Term& t = f->args()[0];
        if (t.is_var()) return ((lookup(env_, t.name) >> i) & 1u) ? T_ : -T_;
        return constvar_.at(t.name)[i];
      }
      case Op::Not: return -enc(f->kid(0));
      case Op::And:
      case Op::Or: {
        std::vector<int> ls;
        for (auto& k : f->kids()) ls.push_back(enc(k));
        return f->op() == Op::And ? mk_and(ls) : mk_or(ls);
      }
      case Op::Forall:
      case Op::Exists: {
        bool all = f->op() == Op::Forall;
        std::vector<int> ls;
        for (Colour g = 0; g < ncol_; ++g) {
          env_.emplace_back(f->name(), g);
          int b = enc(f->kid(0));
          env_.pop_back();
          ls.push_back(all ? mk_or({-in_[g], b}) : mk_and({in_[g], b}));
        }
        return all ? mk_and(ls) : mk_or(ls);
      }
      default: throw std::logic_error("unexpected connective after normalization: " + f->key());
    }
  }

  sat::Solver solver_;
  int T_ = 0;
  Colour ncol_ = 1;
  std::vector<std::string> preds_, props_, consts_;
  std::vector<int> in_;
  std::map<std::string, int> propvar_;
  std::map<std::string, std::vector<int>> constvar_;
  Env env_;
  struct Key {
    const Formula* f;
    std::uint64_t env;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<const void*>()(k.f) ^ (std::hash<std::uint64_t>()(k.env) * 0x9e3779b97f4a7c15ull);
    }
  };
  std::unordered_map<Key, int, KeyHash> memo_;
  std::vector<FormulaPtr> keep_;  // pins node addresses used in memo keys
};

bool holds_all(const AbstractStructure& s, const std::vector<FormulaPtr>& fs) {
  for (auto& f : fs)
    if (!evaluate(s, f)) return false;
  return true;
}

}  // namespace

bool evaluate(const AbstractStructure& s, const FormulaPtr& f) {
  Env env;
  return eval(s, f, env);
}

bool monadic_satisfiable(const std::vector<FormulaPtr>& sentences, AbstractStructure* witness) {
  Encoder e(sentences);
  if (!e.solve()) return false;
  AbstractStructure s = e.structure();
  if (!holds_all(s, sentences)) throw std::logic_error("oracle: extracted structure fails the query");
  if (witness) {
    // greedy colour minimization; colours carrying constants stay
    std::set<Colour> pinned;
    for (auto& [c, g] : s.constant_colour) pinned.insert(g);
    for (std::size_t i = 0; i < s.colours.size() && s.colours.size() > 1;) {
      if (pinned.count(s.colours[i])) {
        ++i;
        continue;
      }
      AbstractStructure t = s;
      t.colours.erase(t.colours.begin() + static_cast<long>(i));
      if (holds_all(t, sentences)) s = std::move(t);
      else ++i;
    }
    *witness = std::move(s);
  }
  return true;
}

namespace {

bool holds_rest(const AbstractStructure& m, const std::vector<FormulaPtr>& fs, std::size_t from) {
  try {
    for (std::size_t i = from; i < fs.size(); ++i)
      if (!evaluate(m, fs[i])) return false;
  } catch (const std::invalid_argument&) {
    return false;  // symbol outside the stored model
  }
  return true;
}

}  // namespace

Oracle::Pool& Oracle::pool_for(const std::vector<FormulaPtr>& sentences, std::size_t base) {
  auto prefix_of = [&](const Pool& p) {
    if (p.base.size() > base) return false;
    for (std::size_t i = 0; i < p.base.size(); ++i)
      if (p.base[i] != sentences[i] && p.base[i]->key() != sentences[i]->key()) return false;
    return true;
  };
  Pool* best = nullptr;
  for (auto& p : pools_)
    if (prefix_of(p) && (!best || p.base.size() > best->base.size())) best = &p;
  if (!best) {
    if (pools_.size() >= kPools)
      pools_.erase(std::min_element(pools_.begin(), pools_.end(),
                                    [](const Pool& a, const Pool& b) { return a.stamp < b.stamp; }));
    pools_.emplace_back();
    best = &pools_.back();
  }
  // models that fail the added hypotheses are dropped
  std::size_t old = best->base.size();
  best->base.assign(sentences.begin(), sentences.begin() + static_cast<long>(base));
  if (old < base)
    std::erase_if(best->models, [&](const AbstractStructure& m) { return !holds_rest(m, best->base, old); });
  best->stamp = ++clock_;
  return *best;
}

bool Oracle::decide(const std::vector<FormulaPtr>& sentences, AbstractStructure* witness, std::size_t base) {
  ++calls_;
  if (budget_ && calls_ > budget_) throw OracleBudgetExceeded("oracle call budget exhausted");
  std::vector<std::string> keys;
  for (auto& f : sentences) keys.push_back(f->key());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::string key;
  for (auto& k : keys) key += k + "\n";
  auto it = memo_.find(key);
  if (it != memo_.end() && (!witness || !it->second.sat || it->second.witness)) {
    if (witness && it->second.sat) *witness = *it->second.witness;
    return it->second.sat;
  }
  ++solver_calls_;
  bool sat;
  std::optional<AbstractStructure> w;
  try {
    if (!witness && base < sentences.size()) {
      Pool& pool = pool_for(sentences, base);
      sat = false;
      for (auto& m : pool.models)
        if (holds_rest(m, sentences, base)) {
          sat = true;
          ++pool_hits_;
          break;
        }
      if (!sat) {
        AbstractStructure s;
        sat = monadic_satisfiable(sentences, &s);
        if (sat) {
          if (pool.models.size() >= kPoolModels) pool.models.erase(pool.models.begin());
          pool.models.push_back(std::move(s));
        }
      }
    } else {
      AbstractStructure s;
      sat = monadic_satisfiable(sentences, witness ? &s : nullptr);
      if (sat && witness) w = std::move(s);
    }
  } catch (const FragmentUnsupported&) {
    if (!external_) throw;
    sat = external_->is_satisfiable({sentences, nullptr});
  }
  if (witness && w) *witness = *w;
  memo_[key] = {sat, std::move(w)};
  return sat;
}

bool Oracle::is_satisfiable(const std::vector<FormulaPtr>& sentences, AbstractStructure* witness) {
  bool r = decide(sentences, witness, sentences.empty() ? 0 : sentences.size() - 1);
  if (recorder_) recorder_->push_back({"sat", sentences, nullptr, r});
  return r;
}

bool Oracle::is_satisfiable(const OracleQuery& q, AbstractStructure* witness) {
  auto all = q.hypotheses;
  if (q.goal) all.push_back(q.goal);
  return is_satisfiable(all, witness);
}

bool Oracle::entails(const std::vector<FormulaPtr>& hyps, const FormulaPtr& goal) {
  auto all = hyps;
  all.push_back(negate(goal));
  bool r = !decide(all, nullptr, hyps.size());
  if (recorder_) recorder_->push_back({"entails", hyps, goal, r});
  return r;
}

bool Oracle::equivalent(const std::vector<FormulaPtr>& hyps, const FormulaPtr& a, const FormulaPtr& b) {
  return entails(hyps, iff(a, b));
}

}  // namespace mfotl
