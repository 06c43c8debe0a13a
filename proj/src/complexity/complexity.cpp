#include "complexity/complexity.hpp"

#include <cstdlib>

#include "python/ast.hpp"

namespace redline::complexity {

std::string_view to_string(Risk risk) {
  switch (risk) {
    case Risk::NoRisk:
      return "no_risk";
    case Risk::LowRiskAddition:
      return "low_risk_addition";
    case Risk::LowRiskRemoval:
      return "low_risk_removal";
    case Risk::HighRiskAddition:
      return "high_risk_addition";
    case Risk::HighRiskRemoval:
      return "high_risk_removal";
  }
  return "no_risk";
}

Risk classify(long delta) {
  if (delta == 0) return Risk::NoRisk;
  bool high = std::labs(delta) >= 10;
  if (delta > 0) return high ? Risk::HighRiskAddition : Risk::LowRiskAddition;
  return high ? Risk::HighRiskRemoval : Risk::LowRiskRemoval;
}

int cyclomatic_complexity(const source::FunctionUnit& fn) {
  python::Module module = python::parse(fn.body_text, {.relative_indentation = true});
  for (const auto& st : module.body) {
    if (st->kind == python::NodeKind::FunctionDef) return source::function_complexity(*st);
  }
  throw python::SyntaxError(fn.span.start_line, "body does not contain a function definition");
}

long file_complexity(std::string_view text) {
  long total = 0;
  for (const auto& fn : source::extract_functions(text, "")) total += fn.complexity;
  return total;
}

ComplexityDelta complexity_delta(const FilePairDiff& pair) {
  ComplexityDelta d;
  if (pair.pre_text) d.pre_cc = file_complexity(*pair.pre_text);
  if (pair.post_text) d.post_cc = file_complexity(*pair.post_text);
  d.delta = d.post_cc - d.pre_cc;
  d.risk = classify(d.delta);
  return d;
}

}  // namespace redline::complexity
