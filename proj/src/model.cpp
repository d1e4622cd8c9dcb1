#include "mfotl/model.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "mfotl/parser.hpp"
#include "mfotl/sat.hpp"

namespace mfotl {

bool LassoModel::present(std::size_t e, std::size_t state) const {
  if (birth.empty()) return true;
  return birth.at(e) <= position(state);
}

bool LassoModel::holds(const std::string& pred, std::size_t state, const Tuple& t) const {
  const auto& s = states.at(position(state));
  auto it = s.find(pred);
  return it != s.end() && it->second.count(t);
}

void validate(const LassoModel& m) {
  auto bad = [](const std::string& w) { throw std::invalid_argument("lasso model: " + w); };
  if (m.loop == 0) bad("loop must have at least one state");
  if (m.states.size() != m.length()) bad("expected " + std::to_string(m.length()) + " states");
  if (m.elements.empty()) bad("empty domain");
  for (auto& [c, e] : m.constants)
    if (e >= m.elements.size()) bad("constant " + c + " out of domain");
  if (m.birth.empty()) return;
  if (m.birth.size() != m.elements.size()) bad("birth list does not match the domain");
  if (m.semantics == Semantics::Constant)
    for (auto b : m.birth)
      if (b != 0) bad("constant domain with a late element");
  bool any = false;
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    if (m.birth[e] > m.prefix) bad("element " + m.elements[e] + " born inside the loop");
    any = any || m.birth[e] == 0;
  }
  if (!any) bad("D_0 is empty");
  for (auto& [c, e] : m.constants)
    if (m.birth[e] != 0) bad("constant " + c + " not in D_0");
}

namespace {

// positions n..end covering every state reachable from n
std::size_t horizon(const LassoModel& m, std::size_t n) { return n < m.prefix ? m.length() : n + m.loop; }

class Evaluator {
 public:
  explicit Evaluator(const LassoModel& m) : m_(m) {}

  bool run(std::size_t n, Assignment& a, const FormulaPtr& f) {
    n = m_.position(n);
    switch (f->op()) {
      case Op::True: return true;
      case Op::False: return false;
      case Op::Atom: {
        Tuple t;
        for (auto& arg : f->args()) t.push_back(element(arg, a));
        return m_.holds(f->name(), n, t);
      }
      case Op::Not: return !run(n, a, f->kid(0));
      case Op::And:
        for (auto& k : f->kids())
          if (!run(n, a, k)) return false;
        return true;
      case Op::Or:
        for (auto& k : f->kids())
          if (run(n, a, k)) return true;
        return false;
      case Op::Implies: return !run(n, a, f->kid(0)) || run(n, a, f->kid(1));
      case Op::Iff: return run(n, a, f->kid(0)) == run(n, a, f->kid(1));
      case Op::Forall:
      case Op::Exists: {
        bool all = f->op() == Op::Forall;
        auto saved = a.find(f->name()) != a.end() ? std::optional<std::size_t>(a[f->name()]) : std::nullopt;
        bool r = all;
        for (std::size_t e = 0; e < m_.elements.size(); ++e) {
          if (!m_.present(e, n)) continue;
          a[f->name()] = e;
          if (run(n, a, f->kid(0)) != all) {
            r = !all;
            break;
          }
        }
        if (saved) a[f->name()] = *saved;
        else a.erase(f->name());
        return r;
      }
      case Op::Next: return run(m_.successor(n), a, f->kid(0));
      case Op::Sometime:
        for (std::size_t i = n; i < horizon(m_, n); ++i)
          if (run(i, a, f->kid(0))) return true;
        return false;
      case Op::Always:
        for (std::size_t i = n; i < horizon(m_, n); ++i)
          if (!run(i, a, f->kid(0))) return false;
        return true;
      case Op::Until:
      case Op::Unless: {
        for (std::size_t i = n; i < horizon(m_, n); ++i) {
          if (run(i, a, f->kid(1))) return true;
          if (!run(i, a, f->kid(0))) return false;
        }
        // phi held on every reachable state without psi
        return f->op() == Op::Unless;
      }
    }
    return false;
  }

 private:
  std::size_t element(const Term& t, const Assignment& a) const {
    if (t.is_var()) {
      auto it = a.find(t.name);
      if (it == a.end()) throw std::invalid_argument("unbound variable " + t.name);
      return it->second;
    }
    auto it = m_.constants.find(t.name);
    if (it == m_.constants.end()) throw std::invalid_argument("constant " + t.name + " not interpreted");
    return it->second;
  }

  const LassoModel& m_;
};

}  // namespace

bool eval(const LassoModel& m, std::size_t n, const Assignment& a, const FormulaPtr& f) {
  for (auto& [v, e] : a) {
    if (e >= m.elements.size()) throw std::invalid_argument("assignment out of domain: " + v);
    if (!m.present(e, n)) throw std::invalid_argument("assignment out of D_" + std::to_string(n) + ": " + v);
  }
  Assignment b = a;
  return Evaluator(m).run(n, b, f);
}

bool holds_everywhere(const LassoModel& m, const FormulaPtr& f) {
  FormulaPtr g = f;
  for (auto& v : f->free()) g = forall(v, g);
  for (std::size_t n = 0; n < m.length(); ++n)
    if (!eval(m, n, {}, g)) return false;
  return true;
}

ProblemCheck check_problem(const LassoModel& m, const TemporalProblem& p) {
  validate(m);
  for (auto& c : p.constants())
    if (!m.constants.count(c)) throw std::invalid_argument("signature mismatch: constant " + c + " not interpreted");
  ProblemCheck r;
  auto fail = [&](const std::string& w) {
    r.ok = false;
    r.failing = w;
    return r;
  };
  for (auto& f : p.initial)
    if (!eval(m, 0, {}, f)) return fail("initial: " + f->key());
  for (auto& f : p.universal)
    if (!holds_everywhere(m, f)) return fail("universal: " + f->key());
  for (auto& c : p.step)
    if (!holds_everywhere(m, c.formula())) return fail("step: " + c.key());
  for (auto& e : p.eventuality)
    if (!holds_everywhere(m, sometime(e.lit.formula("x")))) return fail("eventuality: " + e.key());
  return r;
}

namespace {

// restricted growth strings: constant j maps to at most max(previous)+1
void constant_maps(std::size_t k, std::size_t d, std::vector<std::size_t>& cur,
                   std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  std::size_t hi = 0;
  for (auto e : cur) hi = std::max(hi, e + 1);
  for (std::size_t e = 0; e <= hi && e < d; ++e) {
    cur.push_back(e);
    constant_maps(k, d, cur, out);
    cur.pop_back();
  }
}

class Encoder {
 public:
  Encoder(const LassoModel& shape, std::size_t max_vars) : m_(shape), max_vars_(max_vars) {
    T_ = s_.new_var();
    s_.add_clause({T_});
    const std::size_t d = m_.elements.size();
    if (m_.semantics == Semantics::Expanding) {
      pres_.assign(m_.length(), std::vector<int>(d));
      for (auto& row : pres_)
        for (auto& v : row) v = fresh();
      for (std::size_t e = 0; e < d; ++e) {
        for (std::size_t n = 0; n + 1 < m_.length(); ++n) s_.add_clause({-pres_[n][e], pres_[n + 1][e]});
        s_.add_clause({-pres_[m_.length() - 1][e], pres_[m_.prefix][e]});
        s_.add_clause({pres_[m_.length() - 1][e]});
      }
      std::vector<int> d0;
      for (std::size_t e = 0; e < d; ++e) d0.push_back(pres_[0][e]);
      s_.add_clause(d0);
      for (auto& [c, e] : m_.constants) s_.add_clause({pres_[0][e]});
    }
  }

  void require(const FormulaPtr& f) { s_.add_clause({lit(0, f, {})}); }

  // descending lex order of element feature vectors over [from, d)
  void break_symmetry(std::size_t from, const std::vector<std::string>& unary) {
    auto features = [&](std::size_t e) {
      std::vector<int> v;
      if (!pres_.empty())
        for (std::size_t n = 0; n < m_.length(); ++n) v.push_back(pres_[n][e]);
      for (auto& P : unary) v.push_back(atom_var(P, 0, {e}));
      return v;
    };
    for (std::size_t e = from; e + 1 < m_.elements.size(); ++e) {
      auto a = features(e), b = features(e + 1);
      int eq = T_;
      for (std::size_t i = 0; i < a.size(); ++i) {
        s_.add_clause({-eq, a[i], -b[i]});
        int nx = fresh();
        s_.add_clause({-eq, -a[i], -b[i], nx});
        s_.add_clause({-eq, a[i], b[i], nx});
        eq = nx;
      }
    }
  }

  bool solve() { return s_.solve(); }

  LassoModel extract() const {
    LassoModel r = m_;
    r.states.assign(m_.length(), {});
    for (auto& [k, v] : atoms_) {
      auto& [pred, n, t] = k;
      if (s_.value(v)) r.states[n][pred].insert(t);
    }
    if (!pres_.empty()) {
      r.birth.assign(m_.elements.size(), 0);
      for (std::size_t e = 0; e < m_.elements.size(); ++e) {
        std::size_t b = 0;
        while (!s_.value(pres_[b][e])) ++b;
        r.birth[e] = b;
      }
    }
    return r;
  }

 private:
  int fresh() {
    if (static_cast<std::size_t>(s_.num_vars()) >= max_vars_)
      throw ResourceLimit("bounded search exceeded " + std::to_string(max_vars_) + " variables");
    return s_.new_var();
  }

  int atom_var(const std::string& pred, std::size_t n, const Tuple& t) {
    auto key = std::make_tuple(pred, n, t);
    auto it = atoms_.find(key);
    if (it != atoms_.end()) return it->second;
    int v = fresh();
    atoms_.emplace(key, v);
    return v;
  }

  int mk_and(const std::vector<int>& xs) {
    std::vector<int> ys;
    for (int x : xs) {
      if (x == -T_) return -T_;
      if (x != T_) ys.push_back(x);
    }
    if (ys.empty()) return T_;
    if (ys.size() == 1) return ys[0];
    int t = fresh();
    std::vector<int> back{t};
    for (int y : ys) {
      s_.add_clause({-t, y});
      back.push_back(-y);
    }
    s_.add_clause(back);
    return t;
  }
  int mk_or(const std::vector<int>& xs) {
    std::vector<int> ys;
    for (int x : xs) ys.push_back(-x);
    return -mk_and(ys);
  }
  int mk_iff(int a, int b) { return mk_and({mk_or({-a, b}), mk_or({a, -b})}); }

  std::size_t element(const Term& t, const Assignment& a) const {
    if (t.is_var()) return a.at(t.name);
    auto it = m_.constants.find(t.name);
    if (it == m_.constants.end()) throw std::invalid_argument("constant " + t.name + " not interpreted");
    return it->second;
  }

  int lit(std::size_t n, const FormulaPtr& f, const Assignment& a) {
    std::vector<std::size_t> env;
    for (auto& v : f->free()) env.push_back(a.at(v));
    auto key = std::make_tuple(f.get(), n, env);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    int r = build(n, f, a);
    cache_.emplace(key, r);
    return r;
  }

  int build(std::size_t n, const FormulaPtr& f, const Assignment& a) {
    auto kids = [&](std::size_t at) {
      std::vector<int> xs;
      for (auto& k : f->kids()) xs.push_back(lit(at, k, a));
      return xs;
    };
    switch (f->op()) {
      case Op::True: return T_;
      case Op::False: return -T_;
      case Op::Atom: {
        Tuple t;
        for (auto& arg : f->args()) t.push_back(element(arg, a));
        return atom_var(f->name(), n, t);
      }
      case Op::Not: return -lit(n, f->kid(0), a);
      case Op::And: return mk_and(kids(n));
      case Op::Or: return mk_or(kids(n));
      case Op::Implies: return mk_or({-lit(n, f->kid(0), a), lit(n, f->kid(1), a)});
      case Op::Iff: return mk_iff(lit(n, f->kid(0), a), lit(n, f->kid(1), a));
      case Op::Forall:
      case Op::Exists: {
        bool all = f->op() == Op::Forall;
        std::vector<int> xs;
        Assignment b = a;
        for (std::size_t e = 0; e < m_.elements.size(); ++e) {
          b[f->name()] = e;
          int body = lit(n, f->kid(0), b);
          if (pres_.empty()) xs.push_back(body);
          else xs.push_back(all ? mk_or({-pres_[n][e], body}) : mk_and({pres_[n][e], body}));
        }
        return all ? mk_and(xs) : mk_or(xs);
      }
      case Op::Next: return lit(m_.successor(n), f->kid(0), a);
      case Op::Sometime:
      case Op::Always: {
        std::vector<int> xs;
        for (std::size_t i = n; i < horizon(m_, n); ++i) xs.push_back(lit(m_.position(i), f->kid(0), a));
        return f->op() == Op::Always ? mk_and(xs) : mk_or(xs);
      }
      case Op::Until:
      case Op::Unless: {
        std::vector<int> alts, before;
        for (std::size_t i = n; i < horizon(m_, n); ++i) {
          std::size_t at = m_.position(i);
          auto here = before;
          here.push_back(lit(at, f->kid(1), a));
          alts.push_back(mk_and(here));
          before.push_back(lit(at, f->kid(0), a));
        }
        if (f->op() == Op::Unless) alts.push_back(mk_and(before));
        return mk_or(alts);
      }
    }
    return -T_;
  }

  const LassoModel& m_;
  std::size_t max_vars_;
  sat::Solver s_;
  int T_ = 0;
  std::vector<std::vector<int>> pres_;
  std::map<std::tuple<std::string, std::size_t, Tuple>, int> atoms_;
  std::map<std::tuple<const Formula*, std::size_t, std::vector<std::size_t>>, int> cache_;
};

std::optional<LassoModel> search(const FormulaPtr& f, Semantics sem, SearchBounds b,
                                 const std::function<bool(const LassoModel&)>& accept) {
  if (b.max_domain == 0 || b.max_length == 0) throw std::invalid_argument("bounded search: bounds must be positive");
  Signature sig = signature_of(f);
  std::vector<std::string> consts(sig.constants.begin(), sig.constants.end());
  std::vector<std::string> unary;
  for (auto& [n, ar] : sig.predicates)
    if (ar == 1) unary.push_back(n);
  for (std::size_t d = 1; d <= b.max_domain; ++d) {
    std::vector<std::vector<std::size_t>> maps;
    std::vector<std::size_t> cur;
    constant_maps(consts.size(), d, cur, maps);
    for (std::size_t len = 1; len <= b.max_length; ++len)
      for (std::size_t start = 0; start < len; ++start)
        for (auto& cm : maps) {
          LassoModel shape;
          shape.semantics = sem;
          for (std::size_t e = 0; e < d; ++e) shape.elements.push_back("d" + std::to_string(e));
          shape.prefix = start;
          shape.loop = len - start;
          std::size_t pinned = 0;
          for (std::size_t j = 0; j < consts.size(); ++j) {
            shape.constants[consts[j]] = cm[j];
            pinned = std::max(pinned, cm[j] + 1);
          }
          Encoder enc(shape, b.max_vars);
          enc.require(f);
          enc.break_symmetry(pinned, unary);
          if (!enc.solve()) continue;
          LassoModel m = enc.extract();
          if (!accept(m)) throw std::logic_error("bounded search produced a model that fails evaluation");
          return m;
        }
  }
  return std::nullopt;
}

}  // namespace

std::optional<LassoModel> bounded_search(const FormulaPtr& f, Semantics s, SearchBounds b) {
  if (!f->free().empty()) throw std::invalid_argument("bounded search needs a closed formula");
  return search(f, s, b, [&](const LassoModel& m) { return eval(m, 0, {}, f); });
}

std::optional<LassoModel> bounded_search(const TemporalProblem& p, SearchBounds b) {
  return search(associated_formula(p), p.semantics, b, [&](const LassoModel& m) { return check_problem(m, p).ok; });
}

std::optional<LassoModel> enumerate_search(const TemporalProblem& p, std::size_t max_domain, std::size_t max_length) {
  Signature sig = p.signature();
  std::vector<std::string> unary, props;
  for (auto& [n, ar] : sig.predicates) {
    if (ar > 1) throw std::invalid_argument("enumerate_search: monadic problems only");
    (ar == 1 ? unary : props).push_back(n);
  }
  std::vector<std::string> consts(sig.constants.begin(), sig.constants.end());
  const bool expanding = p.semantics == Semantics::Expanding;
  for (std::size_t d = 1; d <= max_domain; ++d)
    for (std::size_t len = 1; len <= max_length; ++len)
      for (std::size_t start = 0; start < len; ++start) {
        const std::size_t bits = len * (d * unary.size() + props.size());
        if (bits > 24) throw ResourceLimit("enumerate_search: " + std::to_string(bits) + " bits");
        // constants: all maps; births: 0..start per element
        std::size_t cmaps = 1, births = 1;
        for (std::size_t j = 0; j < consts.size(); ++j) cmaps *= d;
        if (expanding)
          for (std::size_t e = 0; e < d; ++e) births *= start + 1;
        for (std::size_t cm = 0; cm < cmaps; ++cm)
          for (std::size_t bm = 0; bm < births; ++bm)
            for (std::uint64_t v = 0; v < (std::uint64_t(1) << bits); ++v) {
              LassoModel m;
              m.semantics = p.semantics;
              for (std::size_t e = 0; e < d; ++e) m.elements.push_back("d" + std::to_string(e));
              m.prefix = start;
              m.loop = len - start;
              std::size_t c = cm;
              for (auto& k : consts) {
                m.constants[k] = c % d;
                c /= d;
              }
              if (expanding) {
                std::size_t r = bm;
                for (std::size_t e = 0; e < d; ++e) {
                  m.birth.push_back(r % (start + 1));
                  r /= start + 1;
                }
                bool ok = std::count(m.birth.begin(), m.birth.end(), 0u) > 0;
                for (auto& [k, e] : m.constants) ok = ok && m.birth[e] == 0;
                if (!ok) continue;
              }
              m.states.assign(len, {});
              std::size_t bit = 0;
              for (std::size_t n = 0; n < len; ++n) {
                for (auto& P : unary)
                  for (std::size_t e = 0; e < d; ++e)
                    if ((v >> bit++) & 1u) m.states[n][P].insert({e});
                for (auto& q : props)
                  if ((v >> bit++) & 1u) m.states[n][q].insert(Tuple{});
              }
              if (check_problem(m, p).ok) return m;
            }
      }
  return std::nullopt;
}

std::string print_model(const LassoModel& m) {
  std::ostringstream os;
  os << "semantics: " << to_string(m.semantics) << "\n";
  os << "domain:";
  for (auto& e : m.elements) os << " " << e;
  os << "\n";
  if (!m.constants.empty()) {
    os << "constants:";
    for (auto& [c, e] : m.constants) os << " " << c << "=" << m.elements[e];
    os << "\n";
  }
  os << "prefix: " << m.prefix << "\nloop: " << m.loop << "\n";
  if (!m.birth.empty()) {
    os << "birth:";
    for (std::size_t e = 0; e < m.elements.size(); ++e) os << " " << m.elements[e] << "=" << m.birth[e];
    os << "\n";
  }
  for (std::size_t n = 0; n < m.states.size(); ++n) {
    os << "state " << n << ":";
    bool first = true;
    for (auto& [pred, rel] : m.states[n])
      for (auto& t : rel) {
        os << (first ? " " : ", ") << pred;
        first = false;
        if (t.empty()) continue;
        os << "(";
        for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << m.elements[t[i]];
        os << ")";
      }
    os << "\n";
  }
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

}  // namespace

LassoModel parse_model(const std::string& text) {
  LassoModel m;
  std::map<std::string, std::size_t> index;
  std::map<std::size_t, std::string> state_lines;
  std::istringstream is(text);
  std::string line;
  int ln = 0;
  auto bad = [&](const std::string& w) { throw ParseError(w, ln, 1); };
  auto elem = [&](const std::string& n) {
    auto it = index.find(n);
    if (it == index.end()) bad("unknown element " + n);
    return it->second;
  };
  while (std::getline(is, line)) {
    ++ln;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) bad("expected `key: value`");
    std::string k = trim(line.substr(0, colon)), v = trim(line.substr(colon + 1));
    if (k == "semantics") {
      if (v == "constant") m.semantics = Semantics::Constant;
      else if (v == "expanding") m.semantics = Semantics::Expanding;
      else bad("unknown semantics " + v);
    } else if (k == "domain") {
      for (auto& w : words(v)) {
        if (index.count(w)) bad("duplicate element " + w);
        index[w] = m.elements.size();
        m.elements.push_back(w);
      }
    } else if (k == "constants" || k == "birth") {
      if (k == "birth") {
        m.birth.assign(m.elements.size(), 0);
      }
      for (auto& w : words(v)) {
        auto eq = w.find('=');
        if (eq == std::string::npos) bad("expected name=value");
        std::string a = w.substr(0, eq), b = w.substr(eq + 1);
        if (k == "constants") m.constants[a] = elem(b);
        else m.birth[elem(a)] = std::stoul(b);
      }
    } else if (k == "prefix" || k == "loop") {
      try {
        (k == "prefix" ? m.prefix : m.loop) = std::stoul(v);
      } catch (const std::exception&) {
        bad("expected a number after " + k);
      }
    } else if (k.rfind("state", 0) == 0) {
      std::size_t n;
      try {
        n = std::stoul(k.substr(5));
      } catch (const std::exception&) {
        bad("expected `state N:`");
      }
      state_lines[n] = v;
    } else {
      bad("unknown key " + k);
    }
  }
  m.states.assign(m.length(), {});
  for (auto& [n, v] : state_lines) {
    if (n >= m.length()) throw ParseError("state " + std::to_string(n) + " beyond prefix + loop", 0, 1);
    std::string buf;
    int depth = 0;
    std::vector<std::string> facts;
    for (char c : v) {
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0) {
        facts.push_back(trim(buf));
        buf.clear();
      } else {
        buf += c;
      }
    }
    if (!trim(buf).empty()) facts.push_back(trim(buf));
    for (auto& f : facts) {
      auto open = f.find('(');
      if (open == std::string::npos) {
        m.states[n][f].insert(Tuple{});
        continue;
      }
      if (f.back() != ')') throw ParseError("malformed fact " + f, 0, 1);
      Tuple t;
      std::string args = f.substr(open + 1, f.size() - open - 2);
      std::istringstream as(args);
      for (std::string a; std::getline(as, a, ',');) {
        auto it = index.find(trim(a));
        if (it == index.end()) throw ParseError("unknown element " + trim(a), 0, 1);
        t.push_back(it->second);
      }
      m.states[n][trim(f.substr(0, open))].insert(t);
    }
  }
  validate(m);
  return m;
}

}  // namespace mfotl
