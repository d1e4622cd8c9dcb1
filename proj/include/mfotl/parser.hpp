#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mfotl/formula.hpp"
#include "mfotl/problem.hpp"

namespace mfotl {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line), col(col) {}
  int line, col;
};

FormulaPtr parse_formula(const std::string& text);

// problem file with an optional `extended { ... }` section of next-atom formulae
struct ParsedProblem {
  TemporalProblem problem;
  std::vector<FormulaPtr> extended;
};

ParsedProblem parse_problem_file(const std::string& text);
TemporalProblem parse_problem(const std::string& text);  // rejects an extended section

// true when the text starts with a problem section keyword
bool looks_like_problem(const std::string& text);

}  // namespace mfotl
