#pragma once

#include <string_view>

#include "ingestion/records.hpp"
#include "source_parser/source_parser.hpp"

namespace redline::complexity {

enum class Risk { NoRisk, LowRiskAddition, LowRiskRemoval, HighRiskAddition, HighRiskRemoval };

std::string_view to_string(Risk risk);

struct ComplexityDelta {
  long pre_cc = 0;
  long post_cc = 0;
  long delta = 0;
  Risk risk = Risk::NoRisk;

  bool operator==(const ComplexityDelta&) const = default;
};

/// |delta| >= 10 is high risk; the sign selects addition or removal.
Risk classify(long delta);

/// Radon-convention CC of a single function. Throws SyntaxError.
int cyclomatic_complexity(const source::FunctionUnit& fn);

/// Sum of the CC of every function (nested ones included) in a module.
/// Throws SyntaxError.
long file_complexity(std::string_view source);

/// CC delta of a file pair; an absent side contributes 0. Throws
/// SyntaxError if either side does not parse.
ComplexityDelta complexity_delta(const FilePairDiff& pair);

}  // namespace redline::complexity
