#include "python/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <optional>

namespace redline::python {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async",
    "await", "break",  "class",   "continue", "def",      "del",    "elif",
    "else",  "except", "finally", "for",      "from",     "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",  "raise",  "return",  "try",      "while",    "with",   "yield",
};

constexpr std::array<std::string_view, 5> kThreeCharOps = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array<std::string_view, 20> kTwoCharOps = {
    "!=", "%=", "&=", "**", "*=", "+=", "-=", "->", "//", "/=",
    ":=", "<<", "<=", "==", ">=", ">>", "@=", "^=", "|=", "<>",
};
constexpr std::string_view kOneCharOps = "%&()*+,-./:;<=>@[]^{|}~";

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return ident_start(c) || std::isdigit(c); }

bool is_string_prefix(std::string_view word) {
  if (word.empty() || word.size() > 2) return false;
  std::string lower;
  for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return lower == "r" || lower == "u" || lower == "b" || lower == "f" || lower == "br" ||
         lower == "rb" || lower == "fr" || lower == "rf";
}

enum class FState { Literal, Expr, Spec };

struct FStringFrame {
  char quote;
  bool triple;
  bool raw;
  // States nest: Literal at the bottom, Expr for each open replacement
  // field, Spec while inside that field's format spec.
  std::vector<FState> states{FState::Literal};
  std::vector<int> expr_depth;  // bracket depth per open Expr state
};

class Lexer {
 public:
  Lexer(std::string_view src, const LexOptions& opt) : src_(src), opt_(opt) {}

  LexResult run() {
    while (out_.status == LexStatus::Ok) {
      if (!fstrings_.empty() && fstrings_.back().states.back() != FState::Expr) {
        lex_fstring_literal();
        continue;
      }
      if (at_line_start_ && depth_ == 0 && fstrings_.empty()) {
        if (!begin_line()) break;
        continue;
      }
      skip_inline_space();
      if (eof()) break;
      lex_one();
    }
    if (out_.status == LexStatus::Ok) finish();
    return std::move(out_);
  }

 private:
  bool eof() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  int col() const { return static_cast<int>(pos_ - line_start_); }

  void fail(LexStatus status, std::string message) {
    out_.status = status;
    out_.error_line = line_;
    out_.error = std::move(message);
  }

  void emit(TokenKind kind, std::size_t start, std::size_t end, int start_line, int start_col) {
    out_.tokens.push_back(Token{kind, src_.substr(start, end - start), start_line, start_col, line_});
    if (kind != TokenKind::NL && kind != TokenKind::Comment) last_significant_ = kind;
  }

  // Consumes one line terminator at pos_, if present.
  bool consume_newline() {
    if (peek() == '\r') {
      ++pos_;
      if (peek() == '\n') ++pos_;
    } else if (peek() == '\n') {
      ++pos_;
    } else {
      return false;
    }
    ++line_;
    line_start_ = pos_;
    return true;
  }

  bool at_newline() const { return peek() == '\n' || peek() == '\r'; }

  void skip_inline_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\f')) ++pos_;
  }

  // Handles indentation at the start of a physical line outside brackets.
  // Returns false at end of input.
  bool begin_line() {
    int column = 0;
    while (!eof()) {
      char c = peek();
      if (c == ' ') {
        ++column;
      } else if (c == '\t') {
        column = (column / 8 + 1) * 8;
      } else if (c == '\f') {
        column = 0;
      } else {
        break;
      }
      ++pos_;
    }
    if (eof()) return false;
    if (peek() == '#' || at_newline()) {
      if (peek() == '#') lex_comment();
      std::size_t start = pos_;
      int start_line = line_;
      int start_col = col();
      if (consume_newline()) {
        out_.tokens.push_back(Token{TokenKind::NL, src_.substr(start, pos_ - start), start_line,
                                    start_col, start_line});
      }
      return true;
    }
    at_line_start_ = false;
    if (!opt_.track_indentation) return true;
    if (opt_.relative_indentation && !base_set_) {
      indents_ = {column};
      base_set_ = true;
      return true;
    }
    base_set_ = true;
    if (column > indents_.back()) {
      indents_.push_back(column);
      emit(TokenKind::Indent, pos_ - static_cast<std::size_t>(col()), pos_, line_, 0);
    } else {
      while (column < indents_.back()) {
        indents_.pop_back();
        if (indents_.empty()) {
          fail(LexStatus::Invalid, "unindent below the base indentation level");
          return false;
        }
        emit(TokenKind::Dedent, pos_, pos_, line_, col());
      }
      if (column != indents_.back()) {
        fail(LexStatus::Invalid, "unindent does not match any outer indentation level");
        return false;
      }
    }
    return true;
  }

  void lex_comment() {
    std::size_t start = pos_;
    int c0 = col();
    while (!eof() && !at_newline()) ++pos_;
    emit(TokenKind::Comment, start, pos_, line_, c0);
  }

  bool in_fstring_expr() const {
    return !fstrings_.empty() && fstrings_.back().states.back() == FState::Expr;
  }

  void lex_one() {
    char c = peek();
    std::size_t start = pos_;
    int start_line = line_;
    int start_col = col();

    if (c == '#') {
      lex_comment();
      return;
    }
    if (at_newline()) {
      consume_newline();
      bool logical = depth_ == 0 && fstrings_.empty();
      out_.tokens.push_back(Token{logical ? TokenKind::Newline : TokenKind::NL,
                                  src_.substr(start, pos_ - start), start_line, start_col,
                                  start_line});
      if (logical) {
        last_significant_ = TokenKind::Newline;
        at_line_start_ = true;
      }
      return;
    }
    if (c == '\\') {
      ++pos_;
      if (eof()) {
        fail(LexStatus::Incomplete, "line continuation at end of input");
        return;
      }
      if (!consume_newline()) {
        fail(LexStatus::Invalid, "unexpected character after line continuation");
        return;
      }
      if (eof()) fail(LexStatus::Incomplete, "line continuation at end of input");
      return;
    }
    if (ident_start(static_cast<unsigned char>(c))) {
      while (!eof() && ident_char(static_cast<unsigned char>(peek()))) ++pos_;
      std::string_view word = src_.substr(start, pos_ - start);
      if ((peek() == '"' || peek() == '\'') && is_string_prefix(word)) {
        lex_string(start, start_line, start_col, word);
        return;
      }
      emit(TokenKind::Name, start, pos_, start_line, start_col);
      return;
    }
    if (c == '"' || c == '\'') {
      lex_string(start, start_line, start_col, {});
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      lex_number();
      emit(TokenKind::Number, start, pos_, start_line, start_col);
      return;
    }
    lex_operator(start, start_line, start_col);
  }

  void lex_number() {
    auto digits = [&](auto pred) {
      while (!eof() && (pred(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    };
    auto is_dec = [](unsigned char ch) { return std::isdigit(ch) != 0; };
    if (peek() == '0' && peek(1) != '\0' && std::strchr("xXoObB", peek(1)) != nullptr) {
      pos_ += 2;
      digits([](unsigned char ch) { return std::isxdigit(ch) != 0; });
      return;
    }
    digits(is_dec);
    if (peek() == '.') {
      ++pos_;
      digits(is_dec);
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      pos_ += 2;
      digits(is_dec);
    }
    if (peek() == 'j' || peek() == 'J') ++pos_;
  }

  void lex_operator(std::size_t start, int start_line, int start_col) {
    std::string_view rest = src_.substr(pos_);
    auto matches = [&](std::string_view op) { return rest.substr(0, op.size()) == op; };
    std::size_t len = 0;
    for (auto op : kThreeCharOps)
      if (matches(op)) len = 3;
    if (len == 0)
      for (auto op : kTwoCharOps)
        if (matches(op)) len = 2;
    if (len == 0 && kOneCharOps.find(peek()) != std::string_view::npos) len = 1;
    if (len == 0 && peek() == '!' && in_fstring_expr()) len = 1;
    if (len == 0) {
      fail(LexStatus::Invalid, std::string("invalid character '") + peek() + "'");
      return;
    }
    char c = peek();
    if (in_fstring_expr()) {
      FStringFrame& frame = fstrings_.back();
      int& d = frame.expr_depth.back();
      if (len == 1 && (c == '(' || c == '[' || c == '{')) {
        ++d;
      } else if (len == 1 && (c == ')' || c == ']' || (c == '}' && d > 0))) {
        --d;
      } else if (len == 1 && c == '}' && d == 0) {
        pos_ += 1;
        emit(TokenKind::Op, start, pos_, start_line, start_col);
        frame.states.pop_back();
        frame.expr_depth.pop_back();
        return;
      } else if (c == ':' && d == 0) {
        pos_ += 1;
        emit(TokenKind::Op, start, pos_, start_line, start_col);
        frame.states.push_back(FState::Spec);
        return;
      }
    } else if (len == 1) {
      if (c == '(' || c == '[' || c == '{') {
        ++depth_;
        open_lines_.push_back(line_);
      }
      if (c == ')' || c == ']' || c == '}') {
        --depth_;
        if (!open_lines_.empty()) open_lines_.pop_back();
      }
    }
    pos_ += len;
    emit(TokenKind::Op, start, pos_, start_line, start_col);
  }

  void lex_string(std::size_t start, int start_line, int start_col, std::string_view prefix) {
    bool raw = prefix.find_first_of("rR") != std::string_view::npos;
    bool fstring = prefix.find_first_of("fF") != std::string_view::npos;
    char quote = peek();
    bool triple = peek(1) == quote && peek(2) == quote;
    pos_ += triple ? 3 : 1;

    if (fstring && !opt_.fstrings_as_strings) {
      emit(TokenKind::FStringStart, start, pos_, start_line, start_col);
      fstrings_.push_back(FStringFrame{quote, triple, raw, {FState::Literal}, {}});
      return;
    }

    bool continued = false;
    while (true) {
      if (eof()) {
        if (triple || continued)
          fail(LexStatus::Incomplete, "end of input in string literal");
        else
          fail(LexStatus::Invalid, "unterminated string literal");
        return;
      }
      char c = peek();
      if (c == '\\') {
        ++pos_;
        if (at_newline()) {
          consume_newline();
          continued = true;
        } else if (eof()) {
          continued = true;  // a following line may complete the literal
        } else {
          ++pos_;
        }
        continue;
      }
      if (c == quote) {
        if (!triple) {
          ++pos_;
          break;
        }
        if (peek(1) == quote && peek(2) == quote) {
          pos_ += 3;
          break;
        }
        ++pos_;
        continue;
      }
      if (at_newline()) {
        if (!triple) {
          fail(LexStatus::Invalid, "unterminated string literal");
          return;
        }
        consume_newline();
        continue;
      }
      ++pos_;
    }
    emit(TokenKind::String, start, pos_, start_line, start_col);
  }

  // Literal text of an f-string (or of a format spec inside one).
  void lex_fstring_literal() {
    FStringFrame& frame = fstrings_.back();
    bool in_spec = frame.states.back() == FState::Spec;
    std::size_t start = pos_;
    int start_line = line_;
    int start_col = col();
    auto flush = [&] {
      if (pos_ > start) emit(TokenKind::FStringMiddle, start, pos_, start_line, start_col);
    };
    while (true) {
      if (eof()) {
        fail(LexStatus::Incomplete, "end of input in f-string");
        return;
      }
      char c = peek();
      if (c == '\\') {
        if (!frame.raw && peek(1) == 'N' && peek(2) == '{') {
          auto close = src_.find('}', pos_);
          if (close == std::string_view::npos) {
            fail(LexStatus::Incomplete, "end of input in f-string");
            return;
          }
          pos_ = close + 1;
          continue;
        }
        ++pos_;
        if (at_newline()) {
          consume_newline();
        } else if (!eof() && (!frame.raw || peek() == frame.quote || peek() == '\\')) {
          ++pos_;
        }
        continue;
      }
      if (c == '{') {
        if (!in_spec && peek(1) == '{') {
          pos_ += 2;
          continue;
        }
        flush();
        std::size_t b = pos_;
        int bl = line_, bc = col();
        ++pos_;
        emit(TokenKind::Op, b, pos_, bl, bc);
        frame.states.push_back(FState::Expr);
        frame.expr_depth.push_back(0);
        return;
      }
      if (c == '}') {
        if (!in_spec) {
          if (peek(1) == '}') {
            pos_ += 2;
            continue;
          }
          fail(LexStatus::Invalid, "single '}' is not allowed in f-string");
          return;
        }
        flush();
        std::size_t b = pos_;
        int bl = line_, bc = col();
        ++pos_;
        emit(TokenKind::Op, b, pos_, bl, bc);
        frame.states.pop_back();  // Spec
        frame.states.pop_back();  // owning Expr
        frame.expr_depth.pop_back();
        return;
      }
      if (c == frame.quote && (!frame.triple || (peek(1) == c && peek(2) == c))) {
        if (in_spec) {
          fail(LexStatus::Invalid, "f-string: expecting '}'");
          return;
        }
        flush();
        std::size_t b = pos_;
        int bl = line_, bc = col();
        pos_ += frame.triple ? 3 : 1;
        emit(TokenKind::FStringEnd, b, pos_, bl, bc);
        fstrings_.pop_back();
        return;
      }
      if (at_newline()) {
        if (!frame.triple) {
          fail(LexStatus::Invalid, "unterminated f-string literal");
          return;
        }
        consume_newline();
        continue;
      }
      ++pos_;
    }
  }

  void finish() {
    if (depth_ != 0 || !fstrings_.empty()) {
      fail(LexStatus::Incomplete, "end of input inside brackets");
      if (depth_ > 0 && !open_lines_.empty()) {
        out_.error_line = open_lines_.back();
        out_.error = "bracket opened here was never closed";
      }
      return;
    }
    if (last_significant_ && *last_significant_ != TokenKind::Newline &&
        *last_significant_ != TokenKind::Indent && *last_significant_ != TokenKind::Dedent) {
      out_.tokens.push_back(Token{TokenKind::Newline, {}, line_, col(), line_});
    }
    if (opt_.track_indentation) {
      while (indents_.size() > 1) {
        indents_.pop_back();
        out_.tokens.push_back(Token{TokenKind::Dedent, {}, line_, 0, line_});
      }
    }
    out_.tokens.push_back(Token{TokenKind::EndMarker, {}, line_, 0, line_});
  }

  std::string_view src_;
  LexOptions opt_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
  std::vector<int> indents_{0};
  bool base_set_ = false;
  int depth_ = 0;
  std::vector<int> open_lines_;
  bool at_line_start_ = true;
  std::optional<TokenKind> last_significant_;
  std::vector<FStringFrame> fstrings_;
  LexResult out_;
};

}  // namespace

LexResult tokenize(std::string_view source, const LexOptions& options) {
  return Lexer(source, options).run();
}

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

}  // namespace redline::python
