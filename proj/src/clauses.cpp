#include "mfotl/clauses.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace mfotl {

namespace {

FormulaPtr ex(const std::string& v, const FormulaPtr& f) { return f->op() == Op::True ? f : exists(v, f); }
FormulaPtr all(const std::string& v, const FormulaPtr& f) { return f->op() == Op::True ? f : forall(v, f); }

int index_in(const std::vector<std::string>& v, const std::string& n) {
  auto it = std::find(v.begin(), v.end(), n);
  return it == v.end() ? -1 : static_cast<int>(it - v.begin());
}

std::vector<std::string> sorted(const std::set<std::string>& s) { return {s.begin(), s.end()}; }

}  // namespace

std::string ColourSpace::colour_name(Colour g) const {
  std::string s = "[";
  for (std::size_t i = 0; i < predicates.size(); ++i) {
    if (i) s += ",";
    s += ((g >> i) & 1u) ? "" : "~";
    s += predicates[i];
  }
  return s + "]";
}

FormulaPtr ColourSpace::colour_formula(Colour g, const std::string& var) const {
  std::vector<FormulaPtr> ls;
  for (std::size_t i = 0; i < predicates.size(); ++i) {
    FormulaPtr a = atom(predicates[i], {Term::var(var)});
    ls.push_back(((g >> i) & 1u) ? a : neg(a));
  }
  return conj(ls);
}

bool ColourSpace::contains(const Signature& sig) const {
  for (auto& [n, a] : sig.predicates) {
    const auto& v = a == 0 ? props : predicates;
    if (a > 1 || index_in(v, n) < 0) return false;
  }
  for (auto& c : sig.constants)
    if (index_in(constants, c) < 0) return false;
  return true;
}

ColourSpace temporal_space(const TemporalProblem& p) {
  std::set<std::string> preds, props;
  auto add = [&](const Literal& l) { (l.unary ? preds : props).insert(l.pred); };
  for (auto& c : p.step) {
    add(c.lhs);
    add(c.rhs);
  }
  for (auto& e : p.eventuality) add(e.lit);
  return {sorted(preds), sorted(props), p.constants()};
}

ColourSpace step_space(const TemporalProblem& p) {
  std::set<std::string> preds, props;
  for (auto& c : p.step) (c.lhs.unary ? preds : props).insert(c.lhs.pred);
  return {sorted(preds), sorted(props), p.constants()};
}

std::string ColourScheme::describe(const ColourSpace& s) const {
  std::string out = "({";
  for (std::size_t i = 0; i < gamma.size(); ++i) out += (i ? "," : "") + s.colour_name(gamma[i]);
  out += "}, [";
  for (std::size_t i = 0; i < s.props.size(); ++i) {
    out += i ? "," : "";
    out += ((theta >> i) & 1u) ? "" : "~";
    out += s.props[i];
  }
  out += "]";
  if (!s.constants.empty()) {
    out += ", {";
    for (std::size_t i = 0; i < s.constants.size(); ++i)
      out += (i ? "," : "") + s.constants[i] + "->" + s.colour_name(rho[i]);
    out += "}";
  }
  return out + ")";
}

AbstractStructure ColourScheme::structure(const ColourSpace& s) const {
  AbstractStructure a;
  a.predicates = s.predicates;
  a.colours = gamma;
  std::sort(a.colours.begin(), a.colours.end());
  for (std::size_t i = 0; i < s.props.size(); ++i) a.props[s.props[i]] = (theta >> i) & 1u;
  for (std::size_t i = 0; i < s.constants.size(); ++i) a.constant_colour[s.constants[i]] = rho[i];
  return a;
}

double scheme_count(const ColourSpace& s) {
  const double K = static_cast<double>(s.colour_count());
  const double m = static_cast<double>(s.constants.size());
  // sum over k of C(K,k) k^m
  double total = 0, binom = 1;
  for (double k = 1; k <= K; ++k) {
    binom = binom * (K - k + 1) / k;
    total += binom * std::pow(k, m);
  }
  return total * std::pow(2.0, static_cast<double>(s.props.size()));
}

std::vector<ColourScheme> colour_schemes(const ColourSpace& s, std::size_t max) {
  if (s.predicates.size() > 5 || s.props.size() > 40 || scheme_count(s) > static_cast<double>(max))
    throw ResourceLimit("colour scheme count " + std::to_string(scheme_count(s)) + " exceeds cap " +
                        std::to_string(max));
  std::vector<ColourScheme> out;
  const std::size_t K = s.colour_count();
  const std::uint64_t pmask = s.props.empty() ? 0 : (~std::uint64_t(0) >> (64 - s.props.size()));
  const std::size_t m = s.constants.size();
  for (std::uint64_t trank = 0; trank <= pmask; ++trank) {
    ColourScheme c;
    c.theta = ~trank & pmask;
    for (std::uint64_t gm = 1; gm < (std::uint64_t(1) << K); ++gm) {
      c.gamma.clear();
      for (std::size_t r = 0; r < K; ++r)
        if ((gm >> r) & 1u) c.gamma.push_back(s.colour_at_rank(r));
      std::vector<std::size_t> idx(m, 0);
      for (;;) {
        c.rho.resize(m);
        for (std::size_t i = 0; i < m; ++i) c.rho[i] = c.gamma[idx[i]];
        out.push_back(c);
        std::size_t i = 0;
        while (i < m && ++idx[i] == c.gamma.size()) idx[i++] = 0;
        if (i == m) break;
      }
    }
  }
  return out;
}

FormulaPtr FullMergedClause::formula() const { return all("x", implies(lhs(), next(rhs()))); }

std::string FullMergedClause::key() const { return lhs()->key() + " => next " + rhs()->key(); }

SchemeCalculus::SchemeCalculus(const TemporalProblem& p, ColourSpace space)
    : space_(std::move(space)), sem_(p.semantics), nonground_(non_ground_steps(p)), ground_(ground_steps(p)) {}

FormulaPtr SchemeCalculus::side(Colour g, const std::string& var, bool lhs) const {
  std::vector<FormulaPtr> out;
  for (auto& c : nonground_) {
    int i = index_in(space_.predicates, c.lhs.pred);
    if (i < 0) continue;
    if ((((g >> i) & 1u) != 0) != c.lhs.positive) continue;
    out.push_back((lhs ? c.lhs : c.rhs).formula(var));
  }
  return conj(out);
}

FormulaPtr SchemeCalculus::ground_side(std::uint64_t theta, bool lhs) const {
  std::vector<FormulaPtr> out;
  for (auto& c : ground_) {
    int i = index_in(space_.props, c.lhs.pred);
    if (i < 0) continue;
    if ((((theta >> i) & 1u) != 0) != c.lhs.positive) continue;
    out.push_back((lhs ? c.lhs : c.rhs).formula());
  }
  return conj(out);
}

FormulaPtr SchemeCalculus::F_theta(std::uint64_t theta) const {
  std::vector<FormulaPtr> ls;
  for (std::size_t i = 0; i < space_.props.size(); ++i)
    ls.push_back(((theta >> i) & 1u) ? prop(space_.props[i]) : neg(prop(space_.props[i])));
  return conj(ls);
}

FormulaPtr SchemeCalculus::at_constant(Colour g, const std::string& c, bool lhs) const {
  return substitute(side(g, "x", lhs), "x", Term::constant(c));
}

FormulaPtr SchemeCalculus::transfer(const ColourScheme& c, bool lhs) const {
  std::vector<FormulaPtr> parts, each;
  bool some_empty = false;
  for (Colour g : c.gamma) {
    FormulaPtr s = side(g, "x", lhs);
    some_empty = some_empty || s->op() == Op::True;
    parts.push_back(ex("x", s));
    each.push_back(s);
  }
  parts.push_back(ground_side(c.theta, lhs));
  for (std::size_t i = 0; i < space_.constants.size(); ++i) parts.push_back(at_constant(c.rho[i], space_.constants[i], lhs));
  if (sem_ == Semantics::Constant && !some_empty) parts.push_back(forall("x", disj(each)));
  return conj(parts);
}

CategoricalTriple SchemeCalculus::categorical(const ColourScheme& c) const {
  std::vector<FormulaPtr> parts, each;
  for (Colour g : c.gamma) {
    parts.push_back(ex("x", F_gamma(g)));
    each.push_back(F_gamma(g));
  }
  parts.push_back(F_theta(c.theta));
  for (std::size_t i = 0; i < space_.constants.size(); ++i)
    parts.push_back(substitute(F_gamma(c.rho[i]), "x", Term::constant(space_.constants[i])));
  parts.push_back(all("x", disj(each)));
  return {conj(parts), transfer(c, true), transfer(c, false)};
}

FullMergedClause SchemeCalculus::canonical_merged(const ColourScheme& c) const {
  return {transfer(c, true), transfer(c, false), top(), top(), c.describe(space_)};
}

FullMergedClause SchemeCalculus::canonical_full(const ColourScheme& c, Colour g) const {
  if (std::find(c.gamma.begin(), c.gamma.end(), g) == c.gamma.end())
    throw std::invalid_argument("colour " + space_.colour_name(g) + " not in scheme " + c.describe(space_));
  return {transfer(c, true), transfer(c, false), A_gamma(g), B_gamma(g),
          c.describe(space_) + " / " + space_.colour_name(g)};
}

const char* to_string(DerivedOrigin o) {
  switch (o) {
    case DerivedOrigin::Forall: return "forall";
    case DerivedOrigin::Exists: return "exists";
    case DerivedOrigin::Constant: return "constant";
    case DerivedOrigin::Ground: return "ground";
  }
  return "?";
}

std::vector<DerivedStepClause> derive_step_clauses(const TemporalProblem& p, const std::vector<std::size_t>& subset) {
  if (subset.empty()) throw std::invalid_argument("derive_step_clauses: empty subset");
  std::vector<FormulaPtr> ls, rs;
  std::vector<StepClause> cs;
  for (std::size_t i : subset) {
    const StepClause& c = p.step.at(i);
    if (c.ground()) throw std::invalid_argument("derive_step_clauses: ground clause " + c.key());
    cs.push_back(c);
    ls.push_back(c.lhs.formula());
    rs.push_back(c.rhs.formula());
  }
  std::vector<DerivedStepClause> out;
  for (auto& k : p.constants())
    for (auto& c : cs)
      out.push_back({substitute(c.lhs.formula(), "x", Term::constant(k)),
                     substitute(c.rhs.formula(), "x", Term::constant(k)), DerivedOrigin::Constant, k});
  out.push_back({exists("x", conj(ls)), exists("x", conj(rs)), DerivedOrigin::Exists, ""});
  if (p.semantics == Semantics::Constant)
    out.push_back({forall("x", disj(ls)), forall("x", disj(rs)), DerivedOrigin::Forall, ""});
  return out;
}

MergedClause merge(const std::vector<DerivedStepClause>& ds) {
  std::vector<FormulaPtr> ls, rs;
  for (auto& d : ds) {
    ls.push_back(d.lhs);
    rs.push_back(d.rhs);
  }
  return {conj(ls), conj(rs)};
}

FullMergedClause full_merge(const MergedClause& m, const std::vector<StepClause>& originals) {
  std::vector<FormulaPtr> as, bs;
  for (auto& c : originals) {
    if (c.ground()) throw std::invalid_argument("full_merge: ground clause " + c.key());
    as.push_back(c.lhs.formula());
    bs.push_back(c.rhs.formula());
  }
  return {m.lhs, m.rhs, conj(as), conj(bs), ""};
}

std::vector<FullMergedClause> canonical_candidates(const TemporalProblem& p, CandidateOptions opt) {
  SchemeCalculus calc(p, step_space(p));
  std::vector<FullMergedClause> out;
  std::unordered_set<std::string> seen;
  for (auto& c : colour_schemes(calc.space(), opt.max_schemes)) {
    if (!opt.with_element) {
      auto m = calc.canonical_merged(c);
      if (seen.insert(m.key()).second) out.push_back(std::move(m));
      continue;
    }
    for (Colour g : c.gamma) {
      auto f = calc.canonical_full(c, g);
      if (seen.insert(f.key()).second) out.push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace mfotl
