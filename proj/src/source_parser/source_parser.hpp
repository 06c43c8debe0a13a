#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "python/ast.hpp"

namespace redline::source {

using SyntaxError = python::SyntaxError;

struct Span {
  int start_line = 0;  // 1-based, inclusive
  int end_line = 0;

  bool operator==(const Span&) const = default;
};

struct FunctionUnit {
  std::string qualified_name;  // dotted, e.g. "Cls.method" or "outer.inner"
  std::string name;            // unqualified
  std::string scope;           // enclosing qualified name, empty at module level
  std::string file_path;
  Span span;
  std::string body_text;  // the source lines of `span`, decorators included
  std::vector<std::string> normalized_tokens;
  std::string normalized_body;  // normalized_tokens joined by single spaces
  int complexity = 1;
  bool nested = false;  // defined inside another function
};

struct LineCategoryCounts {
  long loc = 0;
  long multiline_string_lines = 0;
  long blank_lines = 0;
  long comment_lines = 0;

  bool operator==(const LineCategoryCounts&) const = default;
};

struct ExtractOptions {
  bool include_nested = true;
};

/// All function definitions of a module, sorted by start line (ties by
/// qualified name). Throws SyntaxError.
std::vector<FunctionUnit> extract_functions(std::string_view source, std::string_view file_path,
                                            const ExtractOptions& options = {});

/// Physical-line categories following Radon's raw-metric rules: code,
/// multi-line string, blank and comment-only lines.
LineCategoryCounts count_line_categories(std::string_view source);

/// Cyclomatic complexity contributed by a function definition node.
int function_complexity(const python::Node& fn);

/// Normalized token stream of a function definition inside `module`.
std::vector<std::string> normalize_function(const python::Module& module,
                                            const python::Node& fn);

/// Remove the docstring statement (if any) from a function's source text,
/// leaving the remaining lines untouched. Returns the input on parse failure.
std::string strip_docstring(const std::string& body_text);

}  // namespace redline::source
