#include "mfotl/sat.hpp"

#include <algorithm>
#include <stdexcept>

namespace mfotl::sat {

namespace {

// Luby sequence, 1-based
double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

int Solver::new_var() {
  int v = static_cast<int>(assign_.size());
  assign_.push_back(0);
  level_.push_back(0);
  reason_.push_back(-1);
  phase_.push_back(false);
  seen_.push_back(false);
  activity_.push_back(0.0);
  heap_pos_.push_back(-1);
  watches_.resize(2 * assign_.size());
  heap_insert(v);
  return v;
}

bool Solver::add_clause(std::vector<int> in) {
  if (unsat_) return false;
  if (!trail_lim_.empty()) backtrack(0);
  std::vector<Lit> c;
  for (int l : in) {
    if (l == 0 || std::abs(l) > num_vars()) throw std::out_of_range("sat: bad literal");
    c.push_back(enc(l));
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  std::vector<Lit> keep;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i + 1 < c.size() && c[i + 1] == negl(c[i])) return true;  // tautology
    auto v = lit_value(c[i]);
    if (v > 0) return true;
    if (v == 0) keep.push_back(c[i]);
  }
  if (keep.empty()) return !(unsat_ = true);
  if (keep.size() == 1) {
    enqueue(keep[0], -1);
    if (propagate() >= 0) unsat_ = true;
    return !unsat_;
  }
  attach(std::move(keep), false);
  return true;
}

int Solver::attach(std::vector<Lit> c, bool learnt) {
  int idx = static_cast<int>(clauses_.size());
  watches_[c[0]].push_back(idx);
  watches_[c[1]].push_back(idx);
  clauses_.push_back({std::move(c), learnt});
  return idx;
}

void Solver::enqueue(Lit l, int reason) {
  int v = var(l);
  assign_[v] = (l & 1u) ? -1 : 1;
  level_[v] = static_cast<int>(trail_lim_.size());
  reason_[v] = reason;
  trail_.push_back(l);
}

int Solver::propagate() {
  while (qhead_ < trail_.size()) {
    Lit p = trail_[qhead_++];
    Lit falsel = negl(p);
    auto& ws = watches_[falsel];
    std::size_t i = 0, j = 0;
    int confl = -1;
    while (i < ws.size()) {
      int ci = ws[i++];
      auto& lits = clauses_[ci].lits;
      if (lits[0] == falsel) std::swap(lits[0], lits[1]);
      if (lit_value(lits[0]) > 0) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (lit_value(lits[k]) >= 0) {
          std::swap(lits[1], lits[k]);
          watches_[lits[1]].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (lit_value(lits[0]) < 0) {
        confl = ci;
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(lits[0], ci);
      }
    }
    ws.resize(j);
    if (confl >= 0) {
      qhead_ = trail_.size();
      return confl;
    }
  }
  return -1;
}

void Solver::analyze(int confl, std::vector<Lit>& learnt, int& bt_level) {
  learnt.assign(1, 0);
  int pathc = 0;
  Lit p = 0;
  bool first = true;
  int idx = static_cast<int>(trail_.size()) - 1;
  const int cur = static_cast<int>(trail_lim_.size());
  std::vector<int> touched;
  do {
    auto& lits = clauses_[confl].lits;
    if (clauses_[confl].learnt) {
      // cheap clause activity is not tracked; bump variables only
    }
    for (std::size_t k = first ? 0 : 1; k < lits.size(); ++k) {
      Lit q = lits[k];
      int v = var(q);
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = true;
      touched.push_back(v);
      bump(v);
      if (level_[v] >= cur) ++pathc;
      else learnt.push_back(q);
    }
    first = false;
    while (!seen_[var(trail_[idx])]) --idx;
    p = trail_[idx--];
    confl = reason_[var(p)];
    seen_[var(p)] = false;
    --pathc;
    if (pathc > 0) {
      // the reason clause has p at position 0 after propagation
      auto& rl = clauses_[confl].lits;
      if (rl[0] != p) {
        auto it = std::find(rl.begin(), rl.end(), p);
        std::swap(rl[0], *it);
      }
    }
  } while (pathc > 0);
  learnt[0] = negl(p);
  // minimization: drop literals whose reason is subsumed by the clause
  std::vector<Lit> out{learnt[0]};
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    int r = reason_[var(learnt[k])];
    bool redundant = r >= 0;
    if (redundant) {
      for (Lit q : clauses_[r].lits) {
        int v = var(q);
        if (v == var(learnt[k])) continue;
        if (!seen_[v] && level_[v] > 0) {
          redundant = false;
          break;
        }
      }
    }
    if (!redundant) out.push_back(learnt[k]);
  }
  for (int v : touched) seen_[v] = false;
  learnt = std::move(out);
  bt_level = 0;
  if (learnt.size() > 1) {
    std::size_t mx = 1;
    for (std::size_t k = 2; k < learnt.size(); ++k)
      if (level_[var(learnt[k])] > level_[var(learnt[mx])]) mx = k;
    std::swap(learnt[1], learnt[mx]);
    bt_level = level_[var(learnt[1])];
  }
}

void Solver::backtrack(int level) {
  if (static_cast<int>(trail_lim_.size()) <= level) return;
  for (std::size_t k = trail_.size(); k > static_cast<std::size_t>(trail_lim_[level]); --k) {
    int v = var(trail_[k - 1]);
    phase_[v] = assign_[v] > 0;
    assign_[v] = 0;
    reason_[v] = -1;
    if (heap_pos_[v] < 0) heap_insert(v);
  }
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
}

void Solver::bump(int v) {
  if ((activity_[v] += var_inc_) > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) heap_up(heap_pos_[v]);
}

void Solver::heap_up(int i) {
  int v = heap_[i];
  while (i > 0) {
    int parent = (i - 1) / 2;
    if (activity_[heap_[parent]] >= activity_[v]) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = i;
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

void Solver::heap_down(int i) {
  int v = heap_[i];
  int n = static_cast<int>(heap_.size());
  for (;;) {
    int c = 2 * i + 1;
    if (c >= n) break;
    if (c + 1 < n && activity_[heap_[c + 1]] > activity_[heap_[c]]) ++c;
    if (activity_[heap_[c]] <= activity_[v]) break;
    heap_[i] = heap_[c];
    heap_pos_[heap_[i]] = i;
    i = c;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

void Solver::heap_insert(int v) {
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_pos_[v]);
}

int Solver::heap_pop() {
  int v = heap_[0];
  heap_pos_[v] = -1;
  int last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return v;
}

Solver::Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    int v = heap_pop();
    if (assign_[v] == 0) return phase_[v] ? 2u * v : 2u * v + 1;
  }
  return 0;
}

bool Solver::solve() { return solve({}); }

bool Solver::solve(const std::vector<int>& assumptions) {
  model_.clear();
  if (unsat_) return false;
  backtrack(0);
  if (propagate() >= 0) {
    unsat_ = true;
    return false;
  }
  std::vector<Lit> assume;
  for (int a : assumptions) assume.push_back(enc(a));
  int restart = 0;
  std::uint64_t budget = 100 * static_cast<std::uint64_t>(luby(2, restart));
  std::uint64_t since = 0;
  std::vector<Lit> learnt;
  for (;;) {
    int confl = propagate();
    if (confl >= 0) {
      ++conflicts_;
      ++since;
      if (trail_lim_.empty()) {
        unsat_ = true;
        return false;
      }
      int bt;
      analyze(confl, learnt, bt);
      backtrack(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        int ci = attach(learnt, true);
        enqueue(learnt[0], ci);
      }
      var_inc_ /= 0.95;
      continue;
    }
    if (since >= budget) {
      since = 0;
      budget = 100 * static_cast<std::uint64_t>(luby(2, ++restart));
      backtrack(0);
      continue;
    }
    Lit next = 0;
    while (trail_lim_.size() < assume.size()) {
      Lit a = assume[trail_lim_.size()];
      auto v = lit_value(a);
      if (v > 0) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));
      } else if (v < 0) {
        backtrack(0);
        return false;
      } else {
        next = a;
        break;
      }
    }
    if (next == 0) {
      next = pick_branch();
      if (next == 0) {
        model_.assign(assign_.begin(), assign_.end());
        backtrack(0);
        return true;
      }
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, -1);
  }
}

}  // namespace mfotl::sat
