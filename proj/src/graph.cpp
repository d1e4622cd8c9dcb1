#include "mfotl/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "mfotl/dsnf.hpp"

namespace mfotl {

namespace {

bool all_hold(const AbstractStructure& s, const std::vector<FormulaPtr>& fs) {
  for (auto& f : fs)
    if (!evaluate(s, f)) return false;
  return true;
}

// literal requirement B_gamma puts on the successor colour
struct Req {
  Colour mask = 0, value = 0;
  bool impossible = false;
  bool admits(Colour g) const { return !impossible && (g & mask) == value; }
};

std::vector<Req> successor_requirements(const TemporalProblem& p, const ColourSpace& s) {
  std::vector<Req> out(s.colour_count());
  auto idx = [&](const std::string& n) {
    for (std::size_t i = 0; i < s.predicates.size(); ++i)
      if (s.predicates[i] == n) return static_cast<int>(i);
    return -1;
  };
  for (Colour g = 0; g < s.colour_count(); ++g) {
    Req& r = out[g];
    for (auto& c : p.step) {
      if (c.ground()) continue;
      int li = idx(c.lhs.pred), ri = idx(c.rhs.pred);
      if (li < 0 || ri < 0) continue;
      if ((((g >> li) & 1u) != 0) != c.lhs.positive) continue;
      Colour bit = Colour(1) << ri, want = c.rhs.positive ? bit : 0;
      if ((r.mask & bit) && (r.value & bit) != want) r.impossible = true;
      r.mask |= bit;
      r.value |= want;
    }
  }
  return out;
}

bool literal_in(const Literal& l, const ColourSpace& s, Colour g) {
  for (std::size_t i = 0; i < s.predicates.size(); ++i)
    if (s.predicates[i] == l.pred) return (((g >> i) & 1u) != 0) == l.positive;
  return false;
}

bool prop_in(const Literal& l, const ColourSpace& s, std::uint64_t theta) {
  for (std::size_t i = 0; i < s.props.size(); ++i)
    if (s.props[i] == l.pred) return (((theta >> i) & 1u) != 0) == l.positive;
  return false;
}

std::vector<std::vector<std::size_t>> predecessors(const BehaviourGraph& g, const std::vector<bool>& alive) {
  std::vector<std::vector<std::size_t>> pred(g.size());
  for (std::size_t v = 0; v < g.size(); ++v)
    if (alive[v])
      for (std::size_t w : g.succ[v])
        if (alive[w]) pred[w].push_back(v);
  return pred;
}

// vertices with a path of at least one edge into a target
std::vector<bool> strict_reach(const std::vector<std::vector<std::size_t>>& pred, const std::vector<bool>& target) {
  std::vector<bool> good(pred.size(), false);
  std::deque<std::size_t> q;
  for (std::size_t v = 0; v < pred.size(); ++v)
    if (target[v]) q.push_back(v);
  while (!q.empty()) {
    std::size_t w = q.front();
    q.pop_front();
    for (std::size_t u : pred[w])
      if (!good[u]) {
        good[u] = true;
        q.push_back(u);
      }
  }
  return good;
}

// same on (vertex, colour) pairs; successor colours must admit B_gamma
struct Product {
  std::vector<std::size_t> offset;
  std::size_t nodes = 0;
  explicit Product(const BehaviourGraph& g) {
    for (auto& c : g.vertices) {
      offset.push_back(nodes);
      nodes += c.gamma.size();
    }
  }
};

std::vector<bool> strict_reach_product(const BehaviourGraph& g, const Product& pr,
                                       const std::vector<std::vector<std::size_t>>& pred, const std::vector<Req>& req,
                                       const std::vector<bool>& target) {
  std::vector<bool> good(pr.nodes, false);
  std::deque<std::pair<std::size_t, std::size_t>> q;
  for (std::size_t v = 0; v < g.size(); ++v)
    for (std::size_t k = 0; k < g.vertices[v].gamma.size(); ++k)
      if (target[pr.offset[v] + k]) q.emplace_back(v, k);
  while (!q.empty()) {
    auto [w, k2] = q.front();
    q.pop_front();
    Colour g2 = g.vertices[w].gamma[k2];
    for (std::size_t u : pred[w]) {
      const auto& gam = g.vertices[u].gamma;
      for (std::size_t k = 0; k < gam.size(); ++k) {
        std::size_t id = pr.offset[u] + k;
        if (good[id] || !req[gam[k]].admits(g2)) continue;
        good[id] = true;
        q.emplace_back(u, k);
      }
    }
  }
  return good;
}

struct Violation {
  std::size_t vertex;
  std::string which, detail;
};

std::vector<Violation> violations(const BehaviourGraph& g, const TemporalProblem& p, const std::vector<bool>& alive) {
  std::vector<Violation> out;
  auto pred = predecessors(g, alive);
  std::vector<bool> seen(g.size(), false);
  auto flag = [&](std::size_t v, const std::string& which, const std::string& d) {
    if (seen[v]) return;
    seen[v] = true;
    out.push_back({v, which, d});
  };
  const auto& s = g.space;
  std::vector<Req> req;
  std::unique_ptr<Product> pr;
  for (auto& e : p.eventuality) {
    if (e.ground()) {
      std::vector<bool> target(g.size());
      for (std::size_t v = 0; v < g.size(); ++v) target[v] = alive[v] && prop_in(e.lit, s, g.vertices[v].theta);
      auto good = strict_reach(pred, target);
      for (std::size_t v = 0; v < g.size(); ++v)
        if (alive[v] && !good[v]) flag(v, "3", e.key());
      continue;
    }
    if (!pr) {
      pr = std::make_unique<Product>(g);
      req = successor_requirements(p, s);
    }
    std::vector<bool> target(pr->nodes, false);
    for (std::size_t v = 0; v < g.size(); ++v)
      for (std::size_t k = 0; k < g.vertices[v].gamma.size(); ++k)
        target[pr->offset[v] + k] = alive[v] && literal_in(e.lit, s, g.vertices[v].gamma[k]);
    auto good = strict_reach_product(g, *pr, pred, req, target);
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (!alive[v]) continue;
      for (std::size_t k = 0; k < g.vertices[v].gamma.size(); ++k)
        if (!good[pr->offset[v] + k]) {
          flag(v, "1", e.key() + " at " + s.colour_name(g.vertices[v].gamma[k]));
          break;
        }
    }
    if (g.flooded) continue;
    for (std::size_t ci = 0; ci < s.constants.size(); ++ci) {
      std::vector<bool> t2(g.size());
      for (std::size_t v = 0; v < g.size(); ++v) t2[v] = alive[v] && literal_in(e.lit, s, g.vertices[v].rho[ci]);
      auto good2 = strict_reach(pred, t2);
      for (std::size_t v = 0; v < g.size(); ++v)
        if (alive[v] && !good2[v]) flag(v, "2", e.key() + " for " + s.constants[ci]);
    }
  }
  return out;
}

}  // namespace

bool suitable(const SchemeCalculus& calc, Colour g1, Colour g2, const std::vector<FormulaPtr>& U, Oracle& o) {
  auto q = U;
  q.push_back(exists("x", conj(calc.F_gamma(g2), calc.B_gamma(g1))));
  return o.is_satisfiable(q);
}

bool suitable_theta(const SchemeCalculus& calc, std::uint64_t t1, std::uint64_t t2, const std::vector<FormulaPtr>& U,
                    Oracle& o) {
  auto q = U;
  q.push_back(calc.F_theta(t2));
  q.push_back(calc.B_theta(t1));
  return o.is_satisfiable(q);
}

BehaviourGraph build_graph(const TemporalProblem& p, Oracle& o, GraphOptions opt) {
  SchemeCalculus calc(p, temporal_space(p));
  const ColourSpace& s = calc.space();
  auto schemes = colour_schemes(s, opt.max_schemes);
  Signature su, si;
  for (auto& f : p.universal) collect_signature(f, su);
  si = su;
  for (auto& f : p.initial) collect_signature(f, si);
  const bool eval_u = s.contains(su), eval_i = s.contains(si);

  std::vector<std::size_t> verts;
  std::vector<std::pair<std::size_t, std::string>> excluded;
  std::vector<AbstractStructure> st;
  std::vector<bool> init;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    AbstractStructure a = schemes[i].structure(s);
    FormulaPtr F;
    bool ok;
    if (eval_u) {
      ok = all_hold(a, p.universal);
    } else {
      F = calc.categorical(schemes[i]).F;
      auto q = p.universal;
      q.push_back(F);
      ok = o.is_satisfiable(q);
    }
    if (!ok) {
      excluded.emplace_back(i, "inconsistent");
      continue;
    }
    bool in;
    if (eval_i) {
      in = all_hold(a, p.initial);
    } else {
      if (!F) F = calc.categorical(schemes[i]).F;
      auto q = p.universal;
      q.insert(q.end(), p.initial.begin(), p.initial.end());
      q.push_back(F);
      in = o.is_satisfiable(q);
    }
    verts.push_back(i);
    st.push_back(std::move(a));
    init.push_back(in);
  }

  // edges of G, grouped by B_C
  const std::size_t n = verts.size();
  std::vector<FormulaPtr> B(n);
  std::vector<std::vector<std::size_t>> succ(n);
  std::map<std::string, std::vector<std::size_t>> targets;
  for (std::size_t v = 0; v < n; ++v) {
    B[v] = calc.canonical_merged(schemes[verts[v]]).B;
    auto it = targets.find(B[v]->key());
    if (it == targets.end()) {
      std::vector<std::size_t> ts;
      for (std::size_t w = 0; w < n; ++w)
        if (evaluate(st[w], B[v])) ts.push_back(w);
      it = targets.emplace(B[v]->key(), std::move(ts)).first;
    }
    succ[v] = it->second;
  }

  // reachable part
  std::vector<bool> reach(n, false);
  std::deque<std::size_t> q;
  for (std::size_t v = 0; v < n; ++v)
    if (init[v]) {
      reach[v] = true;
      q.push_back(v);
    }
  while (!q.empty()) {
    std::size_t v = q.front();
    q.pop_front();
    for (std::size_t w : succ[v])
      if (!reach[w]) {
        reach[w] = true;
        q.push_back(w);
      }
  }
  std::vector<std::size_t> remap(n, SIZE_MAX);
  BehaviourGraph g;
  g.space = s;
  g.semantics = p.semantics;
  g.flooded = p.flooded;
  g.schemes = schemes.size();
  for (std::size_t v = 0; v < n; ++v)
    if (reach[v]) {
      remap[v] = g.vertices.size();
      g.vertices.push_back(schemes[verts[v]]);
      g.initial.push_back(init[v]);
      g.B.push_back(B[v]);
    }
  for (std::size_t v = 0; v < n; ++v)
    if (!reach[v]) excluded.emplace_back(verts[v], "unreachable");
  std::sort(excluded.begin(), excluded.end());
  for (auto& [i, why] : excluded) g.excluded.emplace_back(schemes[i], why);
  g.succ.resize(g.vertices.size());
  for (std::size_t v = 0; v < n; ++v)
    if (reach[v])
      for (std::size_t w : succ[v]) g.succ[remap[v]].push_back(remap[w]);
  return g;
}

ConditionReport check_model_conditions(const BehaviourGraph& g, const TemporalProblem& p, const std::vector<bool>* alive) {
  std::vector<bool> all(g.size(), true);
  auto vs = violations(g, p, alive ? *alive : all);
  ConditionReport r;
  if (!vs.empty()) {
    r.ok = false;
    r.which = vs[0].which;
    r.where = g.vertices[vs[0].vertex].describe(g.space) + ": " + vs[0].detail;
  }
  return r;
}

DecideResult decide(const TemporalProblem& p, DecideOptions opt) {
  TemporalProblem P = opt.flood && !p.flooded ? flood_constants(p) : p;
  Oracle o;
  DecideResult res;
  res.graph = build_graph(P, o, {opt.max_schemes});
  const BehaviourGraph& g = res.graph;
  res.alive.assign(g.size(), true);
  auto& alive = res.alive;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (!alive[v]) continue;
      bool has = false;
      for (std::size_t w : g.succ[v]) has = has || alive[w];
      if (!has) {
        alive[v] = false;
        changed = true;
        res.deletions.push_back(g.vertices[v].describe(g.space) + ": no successor");
      }
    }
    if (changed) continue;
    for (auto& vi : violations(g, P, alive)) {
      alive[vi.vertex] = false;
      changed = true;
      res.deletions.push_back(g.vertices[vi.vertex].describe(g.space) + ": condition " + vi.which + " (" +
                              vi.detail + ")");
    }
  }
  // keep what initial vertices still reach
  std::vector<bool> reach(g.size(), false);
  std::deque<std::size_t> q;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (alive[v] && g.initial[v]) {
      reach[v] = true;
      q.push_back(v);
    }
  while (!q.empty()) {
    std::size_t v = q.front();
    q.pop_front();
    for (std::size_t w : g.succ[v])
      if (alive[w] && !reach[w]) {
        reach[w] = true;
        q.push_back(w);
      }
  }
  alive = reach;
  for (std::size_t v = 0; v < g.size(); ++v) res.satisfiable = res.satisfiable || (alive[v] && g.initial[v]);
  res.conditions = check_model_conditions(g, P, &alive);
  if (res.satisfiable && !res.conditions.ok)
    throw std::logic_error("stable graph violates condition " + res.conditions.which + " at " + res.conditions.where);
  return res;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

}  // namespace

std::string to_dot(const BehaviourGraph& g, const std::vector<bool>* alive) {
  std::ostringstream os;
  os << "digraph behaviour {\n  node [shape=circle];\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    os << "  v" << v << " [label=\"" << escape(g.vertices[v].describe(g.space)) << "\"";
    if (g.initial[v]) os << ", shape=doublecircle";
    if (alive && !(*alive)[v]) os << ", style=dashed";
    os << "];\n";
  }
  for (std::size_t i = 0; i < g.excluded.size(); ++i)
    os << "  x" << i << " [label=\"" << escape(g.excluded[i].first.describe(g.space)) << " (" << g.excluded[i].second
       << ")\", style=dotted];\n";
  for (std::size_t v = 0; v < g.size(); ++v)
    for (std::size_t w : g.succ[v]) os << "  v" << v << " -> v" << w << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace mfotl
