#pragma once

#include <cstdint>
#include <vector>

namespace mfotl::sat {

// Small CDCL solver. Literals use DIMACS convention: variable v > 0, negation -v.
class Solver {
 public:
  int new_var();
  int num_vars() const { return static_cast<int>(assign_.size()) - 1; }
  // returns false if the clause set became trivially unsatisfiable
  bool add_clause(std::vector<int> lits);
  bool solve();
  bool solve(const std::vector<int>& assumptions);
  bool value(int v) const { return model_.at(v) > 0; }
  std::uint64_t conflicts() const { return conflicts_; }

 private:
  using Lit = std::uint32_t;  // 2*v + sign
  static Lit enc(int l) { return l > 0 ? 2u * l : 2u * (-l) + 1; }
  static Lit negl(Lit l) { return l ^ 1u; }
  static int var(Lit l) { return static_cast<int>(l >> 1); }
  std::int8_t lit_value(Lit l) const {
    std::int8_t a = assign_[var(l)];
    return (l & 1u) ? static_cast<std::int8_t>(-a) : a;
  }

  void enqueue(Lit l, int reason);
  int propagate();  // conflicting clause index or -1
  void analyze(int confl, std::vector<Lit>& learnt, int& bt_level);
  void backtrack(int level);
  Lit pick_branch();
  void bump(int v);
  void heap_up(int i);
  void heap_down(int i);
  void heap_insert(int v);
  int heap_pop();
  int attach(std::vector<Lit> c, bool learnt);

  struct Clause {
    std::vector<Lit> lits;
    bool learnt;
  };
  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;  // per literal
  std::vector<std::int8_t> assign_{0};     // per var: 1 true, -1 false, 0 unset
  std::vector<int> level_{0}, reason_{-1};
  std::vector<bool> phase_{false}, seen_{false};
  std::vector<double> activity_{0.0};
  std::vector<int> heap_, heap_pos_{-1};
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  double var_inc_ = 1.0;
  bool unsat_ = false;
  std::vector<std::int8_t> model_;
  std::uint64_t conflicts_ = 0;
};

}  // namespace mfotl::sat
