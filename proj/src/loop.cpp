#include "mfotl/loop.hpp"

#include <algorithm>
#include <set>

namespace mfotl {

namespace {

FormulaPtr close_x(const FormulaPtr& f) { return f->free().empty() ? f : forall("x", f); }

std::set<std::string> conjuncts(const FormulaPtr& f) {
  std::set<std::string> out;
  if (f->op() == Op::And)
    for (auto& k : f->kids()) out.insert(k->key());
  else if (f->op() != Op::True)
    out.insert(f->key());
  return out;
}

LoopResult search(const TemporalProblem& p, const Eventuality& ev, const std::vector<FormulaPtr>& U, Oracle& o,
                  LoopOptions opt, const std::vector<FullMergedClause>* given, bool ground) {
  if (ev.ground() != ground) throw std::invalid_argument("loop search: wrong eventuality kind " + ev.key());
  LoopResult res;
  res.eventuality = ev;
  FormulaPtr notL = negate(ev.lit.formula("x"));
  if (o.entails(U, close_x(notL))) {
    res.kind = LoopResult::Kind::Degenerate;
    res.H = top();
    res.clauses = {FullMergedClause{top(), top(), top(), top(), "degenerate"}};
    return res;
  }
  std::vector<FullMergedClause> own;
  if (!given) {
    CandidateOptions co;
    co.with_element = !ground;
    co.max_schemes = opt.max_schemes;
    own = canonical_candidates(p, co);
    given = &own;
  }
  // weakest left-hand sides first, so stronger ones are subsumed before any oracle call
  std::vector<FullMergedClause> pool = *given;
  std::stable_sort(pool.begin(), pool.end(), [](const FullMergedClause& a, const FullMergedClause& b) {
    return conjuncts(a.lhs()).size() < conjuncts(b.lhs()).size();
  });
  FormulaPtr H = top();
  for (int i = 0; i < opt.max_iter; ++i) {
    std::vector<FullMergedClause> q, next_pool;
    std::vector<std::set<std::string>> qsets;
    FormulaPtr goal = conj(notL, H);
    for (auto& c : pool) {
      auto cs = conjuncts(c.lhs());
      bool subsumed = false;
      for (auto& ks : qsets)
        if (std::includes(cs.begin(), cs.end(), ks.begin(), ks.end())) {
          subsumed = true;
          break;
        }
      if (subsumed) {
        next_pool.push_back(c);
        continue;
      }
      if (!o.entails(U, close_x(implies(c.rhs(), goal)))) continue;
      q.push_back(c);
      qsets.push_back(std::move(cs));
      next_pool.push_back(c);
    }
    if (q.empty()) {
      res.kind = LoopResult::Kind::NoLoop;
      return res;
    }
    LoopIteration it;
    it.index = i + 1;
    it.qualifying = q.size();
    it.retained = prune_candidates(q, o);
    it.H = loop_formula(it.retained);
    res.iterations.push_back(it);
    if (o.valid(close_x(implies(H, it.H)))) {
      res.kind = LoopResult::Kind::Loop;
      res.H = it.H;
      res.clauses = it.retained;
      return res;
    }
    H = it.H;
    pool = std::move(next_pool);  // N_{i+1} is contained in N_i
  }
  throw ResourceLimit("loop search exceeded " + std::to_string(opt.max_iter) + " iterations");
}

}  // namespace

FormulaPtr loop_formula(const std::vector<FullMergedClause>& n) {
  std::vector<FormulaPtr> ls;
  for (auto& c : n) ls.push_back(c.lhs());
  return disj(ls);
}

std::vector<FullMergedClause> prune_candidates(const std::vector<FullMergedClause>& n, Oracle& o) {
  std::vector<FullMergedClause> kept;
  auto implied = [&](const FullMergedClause& a, const FullMergedClause& b) {
    auto as = conjuncts(a.lhs()), bs = conjuncts(b.lhs());
    if (std::includes(as.begin(), as.end(), bs.begin(), bs.end())) return true;
    return o.valid(close_x(implies(a.lhs(), b.lhs())));
  };
  for (auto& c : n) {
    bool covered = false;
    for (auto& r : kept)
      if (implied(c, r)) {
        covered = true;
        break;
      }
    if (covered) continue;
    std::erase_if(kept, [&](const FullMergedClause& r) { return implied(r, c); });
    kept.push_back(c);
  }
  return kept;
}

LoopResult bfs_loop(const TemporalProblem& p, const Eventuality& ev, const std::vector<FormulaPtr>& U, Oracle& o,
                    LoopOptions opt, const std::vector<FullMergedClause>* candidates) {
  return search(p, ev, U, o, opt, candidates, false);
}

LoopResult bfs_loop_ground(const TemporalProblem& p, const Eventuality& ev, const std::vector<FormulaPtr>& U,
                           Oracle& o, LoopOptions opt, const std::vector<FullMergedClause>* candidates) {
  return search(p, ev, U, o, opt, candidates, true);
}

}  // namespace mfotl
