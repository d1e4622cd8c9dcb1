#include "mfotl/prover.hpp"

#include <sstream>

#include "json.hpp"
#include "mfotl/dsnf.hpp"
#include "mfotl/parser.hpp"

namespace mfotl {

const char* to_string(Rule r) {
  switch (r) {
    case Rule::StepRes: return "StepRes";
    case Rule::InitTerm: return "InitTerm";
    case Rule::EvRes: return "EvRes";
    case Rule::EvTerm: return "EvTerm";
    case Rule::GroundEvRes: return "GroundEvRes";
    case Rule::GroundEvTerm: return "GroundEvTerm";
    case Rule::Induction: return "Induction";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Unsatisfiable: return "Unsatisfiable";
    case Verdict::Saturated: return "Saturated";
    case Verdict::ResourceLimit: return "ResourceLimit";
  }
  return "?";
}

std::vector<FormulaPtr> Derivation::universal_at(std::size_t k) const {
  std::size_t n = k < steps.size() ? steps[k].universal_before : universal.size();
  return {universal.begin(), universal.begin() + static_cast<long>(n)};
}

namespace {

FormulaPtr close_x(const FormulaPtr& f) { return f->free().empty() ? f : forall("x", f); }

class Engine {
 public:
  Engine(const TemporalProblem& p, const ProverOptions& opt) : opt_(opt) {
    d_.problem = opt.flood && !p.flooded ? flood_constants(p) : p;
    d_.universal = d_.problem.universal;
    if (opt.oracle_budget) o_.set_budget(opt.oracle_budget);
  }

  Derivation run() {
    try {
      body();
    } catch (const ResourceLimit& e) {
      d_.verdict = Verdict::ResourceLimit;
      d_.message = e.what();
    } catch (const OracleBudgetExceeded& e) {
      d_.verdict = Verdict::ResourceLimit;
      d_.message = e.what();
    }
    d_.oracle_calls = o_.calls();
    return std::move(d_);
  }

 private:
  void body() {
    const auto& P = d_.problem;
    bool nonground_ev = false;
    for (auto& e : P.eventuality) nonground_ev = nonground_ev || !e.ground();
    CandidateOptions co;
    co.max_schemes = opt_.max_schemes;
    co.with_element = false;
    merged_ = canonical_candidates(P, co);
    if (nonground_ev) {
      co.with_element = true;
      full_ = canonical_candidates(P, co);
    }
    for (int round = 0; round < opt_.max_rounds; ++round) {
      if (terminated()) return;
      if (step_sweep()) continue;
      if (eventuality_round()) continue;
      d_.verdict = Verdict::Saturated;
      d_.message = "no rule adds a conclusion not already entailed";
      return;
    }
    throw ResourceLimit("prover exceeded " + std::to_string(opt_.max_rounds) + " rounds");
  }

  RuleApplication& record(Rule r) {
    RuleApplication a;
    a.rule = r;
    a.universal_before = d_.universal.size();
    d_.steps.push_back(std::move(a));
    return d_.steps.back();
  }

  // runs fn with transcripts captured into the last record
  template <class F>
  auto recorded(std::vector<Transcript>& sink, F fn) {
    o_.set_recorder(&sink);
    auto r = fn();
    o_.set_recorder(nullptr);
    return r;
  }

  bool terminated() {
    const auto& P = d_.problem;
    std::vector<Transcript> t;
    auto hyps = d_.universal;
    hyps.insert(hyps.end(), P.initial.begin(), P.initial.end());
    if (!recorded(t, [&] { return o_.is_satisfiable(hyps); })) {
      auto& a = record(Rule::InitTerm);
      a.premises = {"U", "I"};
      a.transcripts = std::move(t);
      unsat("initial termination");
      return true;
    }
    for (auto& e : P.eventuality) {
      t.clear();
      FormulaPtr goal = close_x(negate(e.lit.formula("x")));
      if (recorded(t, [&] { return o_.entails(d_.universal, goal); })) {
        auto& a = record(e.ground() ? Rule::GroundEvTerm : Rule::EvTerm);
        a.premises = {e.key()};
        a.conclusion = goal;
        a.transcripts = std::move(t);
        unsat("eventuality termination");
        return true;
      }
    }
    return false;
  }

  void unsat(const std::string& why) {
    d_.verdict = Verdict::Unsatisfiable;
    d_.message = why;
  }

  bool step_sweep() {
    bool added = false;
    for (auto& m : merged_) {
      if (m.B->op() == Op::True) continue;
      std::vector<Transcript> t;
      auto c = recorded(t, [&] { return step_resolution(m, d_.universal, o_); });
      if (!c || o_.entails(d_.universal, *c)) continue;
      auto& a = record(Rule::StepRes);
      a.premises = {m.key()};
      a.loop = {m};
      a.conclusion = *c;
      a.transcripts = std::move(t);
      d_.universal.push_back(*c);
      added = true;
    }
    return added;
  }

  bool eventuality_round() {
    for (auto& e : d_.problem.eventuality) {
      LoopOptions lo = opt_.loop;
      lo.max_schemes = opt_.max_schemes;
      LoopResult r = e.ground() ? bfs_loop_ground(d_.problem, e, d_.universal, o_, lo, &merged_)
                                : bfs_loop(d_.problem, e, d_.universal, o_, lo, &full_);
      if (!r.found()) continue;
      FormulaPtr concl = eventuality_conclusion(r);
      if (o_.entails(d_.universal, concl)) continue;
      // loop side conditions, recorded for replay
      std::vector<Transcript> t;
      FormulaPtr goal = conj(negate(e.lit.formula("x")), r.H);
      for (auto& c : r.clauses) {
        bool ok = recorded(t, [&] { return o_.entails(d_.universal, close_x(implies(c.rhs(), goal))); });
        if (!ok) throw std::logic_error("loop side condition fails for " + c.key());
      }
      if (opt_.two_stage_trace) {
        auto& ind = record(Rule::Induction);
        ind.premises = {e.key()};
        ind.conclusion = close_x(implies(r.H, next(always(negate(e.lit.formula("x"))))));
        ind.loop = r.clauses;
        ind.loop_formula = r.H;
      }
      auto& a = record(e.ground() ? Rule::GroundEvRes : Rule::EvRes);
      a.premises = {e.key()};
      for (auto& c : r.clauses) a.premises.push_back(c.key());
      a.conclusion = concl;
      a.loop = r.clauses;
      a.loop_formula = r.H;
      a.transcripts = std::move(t);
      d_.universal.push_back(concl);
      return true;
    }
    return false;
  }

  ProverOptions opt_;
  Derivation d_;
  Oracle o_;
  std::vector<FullMergedClause> merged_, full_;
};

}  // namespace

std::optional<FormulaPtr> step_resolution(const FullMergedClause& m, const std::vector<FormulaPtr>& U, Oracle& o) {
  FormulaPtr B = close_x(m.rhs());
  if (B->op() == Op::True) return std::nullopt;
  auto hyps = U;
  hyps.push_back(B);
  if (o.is_satisfiable(hyps)) return std::nullopt;
  return close_x(negate(m.lhs()));
}

FormulaPtr eventuality_conclusion(const LoopResult& loop) {
  if (loop.kind == LoopResult::Kind::Degenerate) return bottom();
  std::vector<FormulaPtr> cs;
  for (auto& c : loop.clauses) cs.push_back(negate(c.lhs()));
  return close_x(conj(cs));
}

Derivation prove(const TemporalProblem& p, ProverOptions opt) { return Engine(p, opt).run(); }

namespace {

bool recheck(Oracle& o, const Transcript& t) {
  if (t.kind == "sat") return o.is_satisfiable(t.hypotheses) == t.result;
  return o.entails(t.hypotheses, t.goal) == t.result;
}

// the rule's side conditions against U_k, independent of the transcripts
std::string recheck_rule(Oracle& o, const Derivation& d, std::size_t k) {
  const auto& s = d.steps[k];
  auto U = d.universal_at(k);
  auto eventuality = [&]() -> const Eventuality* {
    for (auto& e : d.problem.eventuality)
      if (!s.premises.empty() && e.key() == s.premises[0]) return &e;
    return nullptr;
  };
  auto appended = [&] {
    return s.universal_before < d.universal.size() && same(d.universal[s.universal_before], s.conclusion);
  };
  switch (s.rule) {
    case Rule::InitTerm: {
      auto h = U;
      h.insert(h.end(), d.problem.initial.begin(), d.problem.initial.end());
      return o.is_satisfiable(h) ? "U and I are consistent" : "";
    }
    case Rule::StepRes: {
      if (s.loop.size() != 1) return "missing clause";
      const auto& m = s.loop[0];
      if (!s.conclusion || !same(s.conclusion, close_x(negate(m.lhs())))) return "conclusion is not ~A";
      auto h = U;
      h.push_back(close_x(m.rhs()));
      if (o.is_satisfiable(h)) return "U and B are consistent";
      return appended() ? "" : "conclusion not added to U";
    }
    case Rule::EvTerm:
    case Rule::GroundEvTerm: {
      auto e = eventuality();
      if (!e) return "unknown eventuality";
      auto goal = close_x(negate(e->lit.formula("x")));
      if (!s.conclusion || !same(s.conclusion, goal)) return "conclusion is not ~L";
      return o.entails(U, goal) ? "" : "U does not entail ~L";
    }
    case Rule::EvRes:
    case Rule::GroundEvRes: {
      auto e = eventuality();
      if (!e || s.loop.empty() || !s.loop_formula) return "incomplete loop";
      LoopResult r;
      r.kind = LoopResult::Kind::Loop;
      r.clauses = s.loop;
      if (!s.conclusion || !same(s.conclusion, eventuality_conclusion(r))) return "conclusion does not match the loop";
      if (!o.valid(close_x(iff(s.loop_formula, loop_formula(s.loop))))) return "loop formula is not the lhs disjunction";
      auto goal = conj(negate(e->lit.formula("x")), s.loop_formula);
      for (auto& c : s.loop)
        if (!o.entails(U, close_x(implies(c.rhs(), goal)))) return "side condition fails for " + c.key();
      return appended() ? "" : "conclusion not added to U";
    }
    case Rule::Induction: return "";
  }
  return "unknown rule";
}

}  // namespace

bool replay(const Derivation& d, std::string* error) {
  Oracle o;
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    auto fail = [&](const std::string& why) {
      if (error) *error = "step " + std::to_string(i + 1) + " (" + to_string(d.steps[i].rule) + "): " + why;
      return false;
    };
    for (auto& t : d.steps[i].transcripts)
      if (!recheck(o, t)) return fail("transcript mismatch");
    if (auto why = recheck_rule(o, d, i); !why.empty()) return fail(why);
  }
  return true;
}

std::string trace_text(const Derivation& d) {
  std::ostringstream os;
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const auto& s = d.steps[i];
    os << "[" << i + 1 << "] " << to_string(s.rule);
    if (!s.premises.empty()) os << "  from " << s.premises[0];
    os << "\n";
    if (s.rule != Rule::StepRes)
      for (auto& c : s.loop) os << "      loop clause: " << c.formula()->key() << "\n";
    if (s.loop_formula) os << "      loop formula: " << s.loop_formula->key() << "\n";
    if (s.conclusion) os << "      conclusion: " << s.conclusion->key() << "\n";
  }
  os << "verdict: " << to_string(d.verdict);
  if (!d.message.empty()) os << " (" << d.message << ")";
  os << "\n";
  return os.str();
}

std::string trace_jsonl(const Derivation& d) {
  using nlohmann::json;
  std::ostringstream os;
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const auto& s = d.steps[i];
    json j;
    j["record"] = "rule";
    j["index"] = i + 1;
    j["rule"] = to_string(s.rule);
    j["premises"] = s.premises;
    j["conclusion"] = s.conclusion ? json(s.conclusion->key()) : json(nullptr);
    json loop = json::array();
    if (s.rule != Rule::StepRes)
      for (auto& c : s.loop) loop.push_back(c.formula()->key());
    j["loop"] = loop;
    j["loop_formula"] = s.loop_formula ? json(s.loop_formula->key()) : json(nullptr);
    json ts = json::array();
    for (auto& t : s.transcripts) {
      json x;
      x["kind"] = t.kind;
      json hs = json::array();
      for (auto& h : t.hypotheses) hs.push_back(h->key());
      x["hypotheses"] = hs;
      x["goal"] = t.goal ? json(t.goal->key()) : json(nullptr);
      x["result"] = t.result;
      ts.push_back(x);
    }
    j["transcripts"] = ts;
    os << j.dump() << "\n";
  }
  json v;
  v["record"] = "verdict";
  v["verdict"] = to_string(d.verdict);
  v["message"] = d.message;
  v["oracle_calls"] = d.oracle_calls;
  os << v.dump() << "\n";
  return os.str();
}

bool replay_jsonl(const std::string& text, std::string* error) {
  using nlohmann::json;
  Oracle o;
  std::istringstream is(text);
  std::string line;
  int n = 0;
  try {
    while (std::getline(is, line)) {
      ++n;
      if (line.empty()) continue;
      json j = json::parse(line);
      if (j.value("record", "") != "rule") continue;
      for (auto& x : j["transcripts"]) {
        Transcript t;
        t.kind = x["kind"].get<std::string>();
        for (auto& h : x["hypotheses"]) t.hypotheses.push_back(parse_formula(h.get<std::string>()));
        if (!x["goal"].is_null()) t.goal = parse_formula(x["goal"].get<std::string>());
        t.result = x["result"].get<bool>();
        if (!recheck(o, t)) {
          if (error) *error = "line " + std::to_string(n) + ": transcript mismatch";
          return false;
        }
      }
    }
  } catch (const std::exception& e) {
    if (error) *error = "line " + std::to_string(n) + ": " + e.what();
    return false;
  }
  return true;
}

}  // namespace mfotl
