// mfotl: normal form, temporal resolution, behaviour graphs and lasso models
// for monodic first-order temporal logic.
//
// exit status: 0 satisfiable / saturated / ok, 1 unsatisfiable (or model
// check failure), 2 usage or input error, 3 resource limit

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfotl/dsnf.hpp"
#include "mfotl/graph.hpp"
#include "mfotl/loop.hpp"
#include "mfotl/model.hpp"
#include "mfotl/parser.hpp"
#include "mfotl/prover.hpp"

using namespace mfotl;
using nlohmann::json;

namespace {

enum Exit { Ok = 0, Unsat = 1, Usage = 2, Limit = 3 };

struct Job {
  std::string input, model_file, out, format = "text", semantics, ground;
  bool no_flood = false, trace = false, dot = false, witness = false;
  int max_iter = 256;
  std::size_t max_schemes = 200000;
  std::uint64_t oracle_budget = 0;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

struct Loaded {
  TemporalProblem problem;
  RenamingLedger ledger;
};

Loaded load(const Job& job) {
  std::string text = slurp(job.input);
  Loaded l;
  Semantics sem = job.semantics == "expanding" ? Semantics::Expanding : Semantics::Constant;
  if (ends_with(job.input, ".fotl") || !looks_like_problem(text)) {
    auto r = to_dsnf(parse_formula(text), sem);
    l.problem = std::move(r.problem);
    l.ledger = std::move(r.ledger);
  } else {
    auto pp = parse_problem_file(text);
    if (pp.extended.empty()) l.problem = std::move(pp.problem);
    else l.problem = reduce_extended({std::move(pp.problem), std::move(pp.extended)});
  }
  if (!job.semantics.empty()) l.problem.semantics = sem;
  if (job.ground == "eventuality") l.problem = reduce_ground_eventuality(l.problem, &l.ledger);
  else if (job.ground == "next-time") l.problem = reduce_ground_next_time(l.problem, &l.ledger);
  return l;
}

json problem_json(const TemporalProblem& p, const RenamingLedger* ledger) {
  json j;
  j["semantics"] = to_string(p.semantics);
  auto keys = [](const std::vector<FormulaPtr>& fs) {
    json a = json::array();
    for (auto& f : fs) a.push_back(f->key());
    return a;
  };
  j["initial"] = keys(p.initial);
  j["universal"] = keys(p.universal);
  j["step"] = json::array();
  for (auto& c : p.step) j["step"].push_back({{"lhs", c.lhs.key()}, {"rhs", c.rhs.key()}});
  j["eventuality"] = json::array();
  for (auto& e : p.eventuality) j["eventuality"].push_back(e.lit.key());
  if (ledger) {
    j["ledger"] = json::array();
    for (auto& e : ledger->entries)
      j["ledger"].push_back(
          {{"name", e.name}, {"origin", e.origin}, {"definition", e.definition ? e.definition->key() : ""}});
  }
  return j;
}

int cmd_dsnf(const Job& job, std::ostream& out) {
  Loaded l = load(job);
  if (job.format == "structured") out << problem_json(l.problem, &l.ledger).dump(2) << "\n";
  else out << print_problem(l.problem, &l.ledger);
  return Ok;
}

int cmd_prove(const Job& job, std::ostream& out) {
  Loaded l = load(job);
  ProverOptions opt;
  opt.flood = !job.no_flood;
  opt.max_schemes = job.max_schemes;
  opt.oracle_budget = job.oracle_budget;
  opt.loop.max_iter = job.max_iter;
  opt.loop.max_schemes = job.max_schemes;
  opt.two_stage_trace = job.trace;
  Derivation d = prove(l.problem, opt);
  if (job.format == "structured") {
    out << trace_jsonl(d);
  } else {
    out << trace_text(d);
    if (d.verdict == Verdict::Saturated) out << "no refutation found\n";
  }
  switch (d.verdict) {
    case Verdict::Unsatisfiable: return Unsat;
    case Verdict::Saturated: return Ok;
    case Verdict::ResourceLimit: return Limit;
  }
  return Ok;
}

int cmd_decide(const Job& job, std::ostream& out) {
  Loaded l = load(job);
  DecideOptions opt;
  opt.flood = !job.no_flood;
  opt.max_schemes = job.max_schemes;
  DecideResult r = decide(l.problem, opt);
  std::optional<LassoModel> w;
  if (r.satisfiable && job.witness) w = bounded_search(l.problem, {2, 4});
  std::size_t alive = 0;
  for (bool a : r.alive) alive += a;
  if (job.format == "dot") {
    out << to_dot(r.graph, &r.alive);
  } else if (job.format == "structured") {
    json j;
    j["verdict"] = r.satisfiable ? "SAT" : "UNSAT";
    j["schemes"] = r.graph.schemes;
    j["vertices"] = r.graph.size();
    j["stable"] = alive;
    j["deletions"] = r.deletions;
    if (w) j["witness"] = print_model(*w);
    out << j.dump(2) << "\n";
  } else {
    out << (r.satisfiable ? "SAT" : "UNSAT") << "\n";
    out << "colour schemes: " << r.graph.schemes << ", reachable vertices: " << r.graph.size()
        << ", stable: " << alive << "\n";
    if (job.trace)
      for (auto& d : r.deletions) out << "deleted " << d << "\n";
    if (r.satisfiable && job.witness) {
      if (w) out << "witness:\n" << print_model(*w);
      else out << "no lasso witness within |D| <= 2, length <= 4\n";
    }
  }
  return r.satisfiable ? Ok : Unsat;
}

int cmd_graph(const Job& job, std::ostream& out) {
  Loaded l = load(job);
  Oracle o;
  TemporalProblem p = job.no_flood || l.problem.flooded ? l.problem : flood_constants(l.problem);
  BehaviourGraph g = build_graph(p, o, {job.max_schemes});
  if (job.dot || job.format == "dot") {
    out << to_dot(g);
    return Ok;
  }
  SchemeCalculus calc(p, g.space);
  if (job.format == "structured") {
    json j;
    j["schemes"] = g.schemes;
    j["vertices"] = json::array();
    for (std::size_t v = 0; v < g.size(); ++v) {
      auto t = calc.categorical(g.vertices[v]);
      j["vertices"].push_back({{"scheme", g.vertices[v].describe(g.space)},
                               {"initial", static_cast<bool>(g.initial[v])},
                               {"F", t.F->key()},
                               {"A", t.A->key()},
                               {"B", t.B->key()},
                               {"succ", g.succ[v]}});
    }
    out << j.dump(2) << "\n";
    return Ok;
  }
  out << "colour schemes: " << g.schemes << ", reachable vertices: " << g.size() << "\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    out << "v" << v << (g.initial[v] ? " (initial) " : " ") << g.vertices[v].describe(g.space) << " ->";
    for (auto w : g.succ[v]) out << " v" << w;
    out << "\n";
    if (job.trace) {
      auto t = calc.categorical(g.vertices[v]);
      out << "    F: " << t.F->key() << "\n    A: " << t.A->key() << "\n    B: " << t.B->key() << "\n";
    }
  }
  return Ok;
}

int cmd_loop(const Job& job, std::ostream& out) {
  Loaded l = load(job);
  TemporalProblem p = job.no_flood || l.problem.flooded ? l.problem : flood_constants(l.problem);
  Oracle o;
  if (job.oracle_budget) o.set_budget(job.oracle_budget);
  LoopOptions opt;
  opt.max_iter = job.max_iter;
  opt.max_schemes = job.max_schemes;
  json all = json::array();
  for (auto& e : p.eventuality) {
    LoopResult r = e.ground() ? bfs_loop_ground(p, e, p.universal, o, opt) : bfs_loop(p, e, p.universal, o, opt);
    const char* kind = r.kind == LoopResult::Kind::Loop ? "loop" : r.kind == LoopResult::Kind::Degenerate ? "degenerate"
                                                                                                        : "no loop";
    if (job.format == "structured") {
      json j;
      j["eventuality"] = e.key();
      j["result"] = kind;
      j["H"] = r.H ? json(r.H->key()) : json(nullptr);
      j["iterations"] = json::array();
      for (auto& it : r.iterations) {
        json c = json::array();
        for (auto& m : it.retained) c.push_back(m.formula()->key());
        j["iterations"].push_back({{"index", it.index}, {"qualifying", it.qualifying}, {"retained", c},
                                   {"H", it.H->key()}});
      }
      all.push_back(j);
      continue;
    }
    out << e.key() << ": " << kind << "\n";
    for (auto& it : r.iterations) {
      out << "  iteration " << it.index << ": " << it.qualifying << " qualifying, " << it.retained.size()
          << " retained\n";
      if (job.trace)
        for (auto& m : it.retained) out << "    " << m.formula()->key() << "\n";
      out << "    H = " << it.H->key() << "\n";
    }
    if (r.H) out << "  loop formula: " << r.H->key() << "\n";
  }
  if (job.format == "structured") out << all.dump(2) << "\n";
  return Ok;
}

int cmd_check_model(const Job& job, std::ostream& out) {
  LassoModel m;
  try {
    m = parse_model(slurp(job.model_file));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (job.semantics == "expanding") m.semantics = Semantics::Expanding;
  if (job.semantics == "constant") m.semantics = Semantics::Constant;
  validate(m);
  ProblemCheck c;
  std::string text = slurp(job.input);
  if (ends_with(job.input, ".fotl") || !looks_like_problem(text)) {
    // formulas are evaluated directly, without the renamed symbols of the normal form
    FormulaPtr f = parse_formula(text);
    if (!eval(m, 0, {}, f)) {
      c.ok = false;
      c.failing = f->key();
    }
  } else {
    c = check_problem(m, load(job).problem);
  }
  if (job.format == "structured") {
    json j;
    j["holds"] = c.ok;
    j["failing"] = c.failing;
    out << j.dump(2) << "\n";
  } else {
    out << (c.ok ? "model satisfies the problem" : "fails: " + c.failing) << "\n";
  }
  return c.ok ? Ok : Unsat;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monodic first-order temporal logic toolkit"};
  app.require_subcommand(1);
  Job job;

  auto common = [&](CLI::App* s) {
    s->add_option("file", job.input, "problem (.tp) or formula (.fotl)")->required();
    s->add_option("--semantics", job.semantics, "constant or expanding")
        ->check(CLI::IsMember({"constant", "expanding"}));
    s->add_flag("--no-flood", job.no_flood, "skip constant flooding");
    s->add_option("--max-iter", job.max_iter, "loop search iteration cap")->check(CLI::PositiveNumber);
    s->add_option("--max-schemes", job.max_schemes, "colour scheme cap")->check(CLI::PositiveNumber);
    s->add_option("--oracle-budget", job.oracle_budget, "oracle call cap")->check(CLI::PositiveNumber);
    s->add_option("--out", job.out, "write output here instead of stdout");
    s->add_option("--format", job.format, "text, structured or dot")
        ->check(CLI::IsMember({"text", "structured", "dot"}));
    s->add_flag("--trace", job.trace, "more detail");
    s->add_option("--ground", job.ground, "ground reduction applied after loading")
        ->check(CLI::IsMember({"eventuality", "next-time"}));
  };
  auto* dsnf = app.add_subcommand("dsnf", "print the temporal problem");
  auto* prove_c = app.add_subcommand("prove", "temporal resolution");
  auto* decide_c = app.add_subcommand("decide", "behaviour graph decision");
  auto* graph = app.add_subcommand("graph", "print the behaviour graph");
  auto* loop = app.add_subcommand("loop", "breadth-first loop search per eventuality");
  auto* check = app.add_subcommand("check-model", "evaluate a lasso model against a problem");
  for (auto* s : {dsnf, prove_c, decide_c, graph, loop}) common(s);
  check->add_option("model", job.model_file, "lasso model file")->required();
  common(check);
  graph->add_flag("--dot", job.dot, "same as --format dot");
  decide_c->add_flag("--witness", job.witness, "search a small lasso model when SAT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return Usage;
  }

  std::ofstream file;
  if (!job.out.empty()) {
    file.open(job.out);
    if (!file) {
      std::cerr << "mfotl: cannot write " << job.out << "\n";
      return Usage;
    }
  }
  std::ostream& out = job.out.empty() ? std::cout : file;
  try {
    if (*dsnf) return cmd_dsnf(job, out);
    if (*prove_c) return cmd_prove(job, out);
    if (*decide_c) return cmd_decide(job, out);
    if (*graph) return cmd_graph(job, out);
    if (*loop) return cmd_loop(job, out);
    if (*check) return cmd_check_model(job, out);
  } catch (const ResourceLimit& e) {
    std::cerr << "mfotl: resource limit: " << e.what() << "\n";
    return Limit;
  } catch (const OracleBudgetExceeded& e) {
    std::cerr << "mfotl: resource limit: " << e.what() << "\n";
    return Limit;
  } catch (const ParseError& e) {
    std::cerr << "mfotl: " << job.input << ":" << e.what() << "\n";
    return Usage;
  } catch (const UsageError& e) {
    std::cerr << "mfotl: " << e.what() << "\n";
    return Usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "mfotl: " << e.what() << "\n";
    return Usage;
  } catch (const FragmentUnsupported& e) {
    std::cerr << "mfotl: " << e.what() << "\n";
    return Usage;
  }
  return Usage;
}
