#include "mfotl/parser.hpp"

#include <cctype>
#include <map>
#include <regex>

namespace mfotl {

namespace {

enum class Tok { Ident, LParen, RParen, Comma, Dot, Semi, LBrace, RBrace, Not, And, Or, Implies, Iff,
                 Arrow, Eq, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '^';
}

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip();
      if (i_ >= s_.size()) {
        out.push_back({Tok::End, "", line_, col_});
        return out;
      }
      int l = line_, c = col_;
      char ch = s_[i_];
      if (ident_start(ch)) {
        std::size_t j = i_;
        while (j < s_.size() && ident_char(s_[j])) ++j;
        std::string id = s_.substr(i_, j - i_);
        adv(j - i_);
        if (id == "ledger") {
          skip_ledger(l, c);
          continue;
        }
        out.push_back({Tok::Ident, id, l, c});
        continue;
      }
      auto two = s_.substr(i_, 3);
      if (two.rfind("<->", 0) == 0) { out.push_back({Tok::Iff, "<->", l, c}); adv(3); continue; }
      if (two.rfind("->", 0) == 0) { out.push_back({Tok::Implies, "->", l, c}); adv(2); continue; }
      if (two.rfind("=>", 0) == 0) { out.push_back({Tok::Arrow, "=>", l, c}); adv(2); continue; }
      Tok k;
      switch (ch) {
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case ',': k = Tok::Comma; break;
        case '.': k = Tok::Dot; break;
        case ';': k = Tok::Semi; break;
        case '{': k = Tok::LBrace; break;
        case '}': k = Tok::RBrace; break;
        case '~': k = Tok::Not; break;
        case '&': k = Tok::And; break;
        case '|': k = Tok::Or; break;
        case '=': k = Tok::Eq; break;
        default: throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
      }
      out.push_back({k, std::string(1, ch), l, c});
      adv(1);
    }
  }

 private:
  void adv(std::size_t n) {
    for (std::size_t k = 0; k < n && i_ < s_.size(); ++k, ++i_) {
      if (s_[i_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
    }
  }
  void skip() {
    while (i_ < s_.size()) {
      char ch = s_[i_];
      if (std::isspace(static_cast<unsigned char>(ch))) { adv(1); continue; }
      if (ch == '%' || ch == '#' || (ch == '/' && i_ + 1 < s_.size() && s_[i_ + 1] == '/')) {
        while (i_ < s_.size() && s_[i_] != '\n') adv(1);
        continue;
      }
      break;
    }
  }
  // the ledger section is informational output; skipped verbatim
  void skip_ledger(int l, int c) {
    skip();
    if (i_ >= s_.size() || s_[i_] != '{') throw ParseError("expected '{' after ledger", l, c);
    while (i_ < s_.size() && s_[i_] != '}') adv(1);
    if (i_ >= s_.size()) throw ParseError("unterminated ledger section", l, c);
    adv(1);
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1, col_ = 1;
};

const std::set<std::string> kKeywords = {"forall", "exists", "next", "always", "sometime",
                                         "until", "unless", "true", "false"};

bool is_var_name(const std::string& s) {
  static const std::regex re("[u-z][0-9']*");
  return std::regex_match(s, re);
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  const Token& peek() const { return t_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(const char* w) const { return at(Tok::Ident) && peek().text == w; }
  Token take() { return t_[pos_++]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().col); }
  Token expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return take();
  }

  FormulaPtr formula() {
    if (at_word("forall") || at_word("exists")) return quantified();
    return iff_level();
  }

  Signature sig;

 private:
  FormulaPtr quantified() {
    bool all = take().text == "forall";
    std::vector<std::string> vars;
    do {
      if (!at(Tok::Ident) || kKeywords.count(peek().text)) fail("expected variable name");
      vars.push_back(take().text);
      if (at(Tok::Comma)) take();
    } while (!at(Tok::Dot));
    take();
    for (auto& v : vars) bound_.push_back(v);
    FormulaPtr body = formula();
    for (std::size_t i = 0; i < vars.size(); ++i) bound_.pop_back();
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = all ? forall(*it, body) : exists(*it, body);
    return body;
  }

  FormulaPtr iff_level() {
    FormulaPtr f = implies_level();
    while (at(Tok::Iff)) {
      take();
      f = iff(f, implies_level());
    }
    return f;
  }

  FormulaPtr implies_level() {
    FormulaPtr f = or_level();
    if (at(Tok::Implies)) {
      take();
      return implies(f, implies_level());
    }
    return f;
  }

  FormulaPtr or_level() {
    std::vector<FormulaPtr> fs{and_level()};
    while (at(Tok::Or)) {
      take();
      fs.push_back(and_level());
    }
    return fs.size() == 1 ? fs[0] : raw(Op::Or, fs);
  }

  FormulaPtr and_level() {
    std::vector<FormulaPtr> fs{until_level()};
    while (at(Tok::And)) {
      take();
      fs.push_back(until_level());
    }
    return fs.size() == 1 ? fs[0] : raw(Op::And, fs);
  }

  // And/Or go through the simplifying constructors; this keeps parse(print(f)) stable
  static FormulaPtr raw(Op op, const std::vector<FormulaPtr>& fs) {
    return op == Op::And ? conj(fs) : disj(fs);
  }

  FormulaPtr until_level() {
    FormulaPtr f = unary();
    if (at_word("until") || at_word("unless")) {
      bool u = take().text == "until";
      FormulaPtr g = until_level();
      return u ? until(f, g) : unless(f, g);
    }
    return f;
  }

  FormulaPtr unary() {
    if (at(Tok::Not)) { take(); return neg(unary()); }
    if (at_word("next")) { take(); return next(unary()); }
    if (at_word("always")) { take(); return always(unary()); }
    if (at_word("sometime")) { take(); return sometime(unary()); }
    if (at_word("forall") || at_word("exists")) return quantified();
    if (at(Tok::LParen)) {
      take();
      FormulaPtr f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (at_word("true")) { take(); return top(); }
    if (at_word("false")) { take(); return bottom(); }
    if (at(Tok::Ident) && !kKeywords.count(peek().text)) return atom_();
    fail("expected formula");
  }

  FormulaPtr atom_() {
    Token name = take();
    std::vector<Term> args;
    if (at(Tok::LParen)) {
      take();
      for (;;) {
        if (!at(Tok::Ident) || kKeywords.count(peek().text)) fail("expected term");
        Token a = take();
        if (at(Tok::LParen)) throw ParseError("function symbols are not supported: " + a.text, a.line, a.col);
        bool var = std::find(bound_.begin(), bound_.end(), a.text) != bound_.end() || is_var_name(a.text);
        if (var) {
          args.push_back(Term::var(a.text));
        } else {
          try {
            sig.add_constant(a.text);
          } catch (const SignatureError& e) {
            throw ParseError(e.what(), a.line, a.col);
          }
          args.push_back(Term::constant(a.text));
        }
        if (at(Tok::Comma)) { take(); continue; }
        expect(Tok::RParen, "')' or ','");
        break;
      }
    }
    if (at(Tok::Eq)) fail("equality is not supported");
    try {
      sig.add_predicate(name.text, static_cast<int>(args.size()));
    } catch (const SignatureError& e) {
      throw ParseError(e.what(), name.line, name.col);
    }
    return atom(name.text, std::move(args));
  }

  std::vector<Token> t_;
  std::size_t pos_ = 0;
  std::vector<std::string> bound_;
};

Literal step_literal(const FormulaPtr& f, const Token& at) {
  const FormulaPtr& a = f->op() == Op::Not ? f->kid(0) : f;
  if (a->is_atom() && a->args().size() == 1 && !a->args()[0].is_var())
    throw ParseError("ground atom " + a->key() + " must be renamed to a proposition", at.line, at.col);
  Literal l;
  if (!as_literal(f, l)) throw ParseError("step and eventuality sides must be literals: " + f->key(), at.line, at.col);
  return l;
}

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  Parser p(Lexer(text).run());
  FormulaPtr f = p.formula();
  if (!p.at(Tok::End)) p.fail("unexpected trailing input");
  return f;
}

bool looks_like_problem(const std::string& text) {
  static const std::regex re(R"(^\s*(((%|#|//)[^\n]*\n)\s*)*(initial|universal|step|eventuality|extended|semantics|ledger)\b)");
  return std::regex_search(text, re);
}

ParsedProblem parse_problem_file(const std::string& text) {
  Parser p(Lexer(text).run());
  ParsedProblem out;
  auto& prob = out.problem;
  auto closed_fo = [&](const FormulaPtr& f, const Token& at, const char* where) {
    if (f->has_temporal()) throw ParseError(std::string(where) + " formulae must be temporal-free", at.line, at.col);
    if (!f->free().empty())
      throw ParseError(std::string(where) + " formula has free variable " + f->free()[0], at.line, at.col);
  };
  while (!p.at(Tok::End)) {
    Token sec = p.expect(Tok::Ident, "section name");
    if (sec.text == "semantics") {
      Token v = p.expect(Tok::Ident, "constant or expanding");
      if (v.text == "constant") prob.semantics = Semantics::Constant;
      else if (v.text == "expanding") prob.semantics = Semantics::Expanding;
      else throw ParseError("unknown semantics " + v.text, v.line, v.col);
      p.expect(Tok::Semi, "';'");
      continue;
    }
    p.expect(Tok::LBrace, "'{'");
    while (!p.at(Tok::RBrace)) {
      Token start = p.peek();
      if (sec.text == "initial" || sec.text == "universal") {
        FormulaPtr f = p.formula();
        closed_fo(f, start, sec.text.c_str());
        (sec.text == "initial" ? prob.initial : prob.universal).push_back(f);
      } else if (sec.text == "step") {
        FormulaPtr l = p.formula();
        p.expect(Tok::Arrow, "'=>'");
        if (!p.at_word("next")) p.fail("expected 'next'");
        p.take();
        FormulaPtr r = p.formula();
        StepClause c{step_literal(l, start), step_literal(r, start)};
        if (c.lhs.unary != c.rhs.unary)
          throw ParseError("step clause mixes propositional and unary literals", start.line, start.col);
        if (c.lhs.unary && l->free() != r->free())
          throw ParseError("step clause sides use different variables", start.line, start.col);
        prob.step.push_back(c);
      } else if (sec.text == "eventuality") {
        if (!p.at_word("sometime")) p.fail("expected 'sometime'");
        p.take();
        prob.eventuality.push_back({step_literal(p.formula(), start)});
      } else if (sec.text == "extended") {
        FormulaPtr f = p.formula();
        if (!f->free().empty())
          throw ParseError("extended formula has free variable " + f->free()[0], start.line, start.col);
        out.extended.push_back(f);
      } else {
        throw ParseError("unknown section " + sec.text, sec.line, sec.col);
      }
      p.expect(Tok::Semi, "';'");
    }
    p.take();
  }
  return out;
}

TemporalProblem parse_problem(const std::string& text) {
  auto pp = parse_problem_file(text);
  if (!pp.extended.empty()) throw ParseError("extended section not allowed here", 1, 1);
  return pp.problem;
}

}  // namespace mfotl
