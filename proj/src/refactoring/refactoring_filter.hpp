#pragma once

#include <string>
#include <vector>

#include "source_parser/source_parser.hpp"

namespace redline::refactoring {

using source::FunctionUnit;

enum class Kind { MoveMethod, RenameMethod };

std::string_view to_string(Kind kind);

struct RefactoringMatch {
  Kind kind;
  std::size_t old_index;  // into base_fns
  std::size_t new_index;  // into head_fns
  double body_similarity;
};

struct FilterOptions {
  double similarity_threshold = 0.95;
  long min_function_lines = 3;  // shorter functions never match
};

/// 2 * LCS(a, b) / (|a| + |b|); 1 for two empty sequences.
double token_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Head functions whose (file_path, qualified_name) does not occur in base.
std::vector<FunctionUnit> candidate_new_functions(const std::vector<FunctionUnit>& base_fns,
                                                  const std::vector<FunctionUnit>& head_fns);

/// Greedy one-to-one Move/Rename matching between base functions that are
/// gone from head and head functions that are new. Renames are taken first,
/// then by descending similarity, then by head and base position.
std::vector<RefactoringMatch> detect_refactorings(const std::vector<FunctionUnit>& base_fns,
                                                  const std::vector<FunctionUnit>& head_fns,
                                                  const FilterOptions& options = {});

/// `candidates` minus the head side of every match.
std::vector<FunctionUnit> exclude_matches(const std::vector<FunctionUnit>& candidates,
                                          const std::vector<FunctionUnit>& head_fns,
                                          const std::vector<RefactoringMatch>& matches);

/// F_new: candidate_new_functions minus detected refactorings.
std::vector<FunctionUnit> filtered_new_functions(const std::vector<FunctionUnit>& base_fns,
                                                 const std::vector<FunctionUnit>& head_fns,
                                                 const FilterOptions& options = {});

}  // namespace redline::refactoring
