#include "refactoring/refactoring_filter.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <utility>

namespace redline::refactoring {

namespace {

using Key = std::pair<std::string, std::string>;

Key key_of(const FunctionUnit& f) { return {f.file_path, f.qualified_name}; }

std::set<Key> keys_of(const std::vector<FunctionUnit>& fns) {
  std::set<Key> keys;
  for (const auto& f : fns) keys.insert(key_of(f));
  return keys;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::vector<std::string>& rows = a.size() >= b.size() ? a : b;
  const std::vector<std::string>& cols = a.size() >= b.size() ? b : a;
  std::vector<std::size_t> prev(cols.size() + 1, 0);
  std::vector<std::size_t> cur(cols.size() + 1, 0);
  for (const auto& r : rows) {
    for (std::size_t j = 1; j <= cols.size(); ++j)
      cur[j] = r == cols[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[cols.size()];
}

bool long_enough(const FunctionUnit& f, long min_lines) {
  return min_lines <= 0 || source::count_line_categories(f.body_text).loc >= min_lines;
}

}  // namespace

std::string_view to_string(Kind kind) { return kind == Kind::MoveMethod ? "move_method" : "rename_method"; }

double token_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  return 2.0 * static_cast<double>(lcs_length(a, b)) / static_cast<double>(a.size() + b.size());
}

std::vector<FunctionUnit> candidate_new_functions(const std::vector<FunctionUnit>& base_fns,
                                                  const std::vector<FunctionUnit>& head_fns) {
  auto base_keys = keys_of(base_fns);
  std::vector<FunctionUnit> out;
  for (const auto& f : head_fns)
    if (!base_keys.count(key_of(f))) out.push_back(f);
  return out;
}

std::vector<RefactoringMatch> detect_refactorings(const std::vector<FunctionUnit>& base_fns,
                                                  const std::vector<FunctionUnit>& head_fns,
                                                  const FilterOptions& options) {
  auto base_keys = keys_of(base_fns);
  auto head_keys = keys_of(head_fns);

  std::vector<std::size_t> removed, added;
  for (std::size_t i = 0; i < base_fns.size(); ++i)
    if (!head_keys.count(key_of(base_fns[i])) && long_enough(base_fns[i], options.min_function_lines))
      removed.push_back(i);
  for (std::size_t j = 0; j < head_fns.size(); ++j)
    if (!base_keys.count(key_of(head_fns[j])) && long_enough(head_fns[j], options.min_function_lines))
      added.push_back(j);

  std::vector<RefactoringMatch> eligible;
  for (std::size_t i : removed) {
    const auto& old_fn = base_fns[i];
    for (std::size_t j : added) {
      const auto& new_fn = head_fns[j];
      std::size_t na = old_fn.normalized_tokens.size(), nb = new_fn.normalized_tokens.size();
      // LCS is bounded by the shorter sequence.
      if (na + nb > 0 && 2.0 * static_cast<double>(std::min(na, nb)) / static_cast<double>(na + nb) <
                             options.similarity_threshold)
        continue;
      double sim = token_similarity(old_fn.normalized_tokens, new_fn.normalized_tokens);
      if (sim < options.similarity_threshold) continue;
      bool rename = old_fn.file_path == new_fn.file_path && old_fn.scope == new_fn.scope &&
                    old_fn.name != new_fn.name;
      eligible.push_back({rename ? Kind::RenameMethod : Kind::MoveMethod, i, j, sim});
    }
  }

  auto order = [&](const RefactoringMatch& m) {
    const auto& h = head_fns[m.new_index];
    const auto& b = base_fns[m.old_index];
    return std::make_tuple(m.kind == Kind::RenameMethod ? 0 : 1, -m.body_similarity, std::cref(h.file_path),
                           h.span.start_line, std::cref(b.file_path), b.span.start_line);
  };
  std::sort(eligible.begin(), eligible.end(),
            [&](const RefactoringMatch& x, const RefactoringMatch& y) { return order(x) < order(y); });

  std::vector<bool> old_used(base_fns.size(), false), new_used(head_fns.size(), false);
  std::vector<RefactoringMatch> matches;
  for (const auto& m : eligible) {
    if (old_used[m.old_index] || new_used[m.new_index]) continue;
    old_used[m.old_index] = new_used[m.new_index] = true;
    matches.push_back(m);
  }
  return matches;
}

std::vector<FunctionUnit> exclude_matches(const std::vector<FunctionUnit>& candidates,
                                          const std::vector<FunctionUnit>& head_fns,
                                          const std::vector<RefactoringMatch>& matches) {
  std::set<Key> moved;
  for (const auto& m : matches) moved.insert(key_of(head_fns[m.new_index]));
  std::vector<FunctionUnit> out;
  for (const auto& f : candidates)
    if (!moved.count(key_of(f))) out.push_back(f);
  return out;
}

std::vector<FunctionUnit> filtered_new_functions(const std::vector<FunctionUnit>& base_fns,
                                                 const std::vector<FunctionUnit>& head_fns,
                                                 const FilterOptions& options) {
  return exclude_matches(candidate_new_functions(base_fns, head_fns), head_fns,
                         detect_refactorings(base_fns, head_fns, options));
}

}  // namespace redline::refactoring
