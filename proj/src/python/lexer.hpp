#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace redline::python {

enum class TokenKind {
  Name,
  Number,
  String,
  FStringStart,
  FStringMiddle,
  FStringEnd,
  Op,
  Comment,
  Newline,
  NL,
  Indent,
  Dedent,
  EndMarker,
};

struct Token {
  TokenKind kind;
  std::string_view text;
  int line = 0;      // 1-based line of the first character
  int col = 0;       // byte column of the first character
  int end_line = 0;  // 1-based line of the last character
};

enum class LexStatus {
  Ok,
  Incomplete,  // input ended inside a string, bracket or line continuation
  Invalid,     // a character sequence that is not a Python token
};

struct LexOptions {
  // Emit INDENT/DEDENT and validate dedent levels.
  bool track_indentation = true;
  // Use the first logical line's indentation as the outermost level.
  bool relative_indentation = false;
  // Produce one String token per f-string instead of the structured
  // FStringStart/Middle/End sequence (tokenize-module behaviour of 3.10).
  bool fstrings_as_strings = false;
};

struct LexResult {
  std::vector<Token> tokens;
  LexStatus status = LexStatus::Ok;
  int error_line = 0;
  std::string error;
};

/// Tokenize Python source. Token text views point into `source`, which
/// must outlive the result. Lexing stops at the first Incomplete/Invalid
/// condition; tokens produced so far are kept.
LexResult tokenize(std::string_view source, const LexOptions& options = {});

bool is_keyword(std::string_view word);

}  // namespace redline::python
