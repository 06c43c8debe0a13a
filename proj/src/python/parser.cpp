#include <algorithm>
#include <array>
#include <utility>

#include "python/ast.hpp"

namespace redline::python {

namespace {

constexpr std::array<std::string_view, 13> kAugAssignOps = {
    "+=", "-=", "*=", "/=", "//=", "%=", "@=", "&=", "|=", "^=", ">>=", "<<=", "**=",
};

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      if (toks_[i].kind != TokenKind::Comment && toks_[i].kind != TokenKind::NL) sig_.push_back(i);
    }
  }

  std::vector<NodePtr> parse_module() {
    std::vector<NodePtr> body;
    while (!at(TokenKind::EndMarker)) parse_statement(body);
    return body;
  }

 private:
  // ---- token cursor -------------------------------------------------------

  const Token& tok(std::size_t ahead = 0) const {
    std::size_t i = std::min(p_ + ahead, sig_.size() - 1);
    return toks_[sig_[i]];
  }
  bool at(TokenKind kind, std::size_t ahead = 0) const { return tok(ahead).kind == kind; }
  bool at_op(std::string_view op, std::size_t ahead = 0) const {
    return tok(ahead).kind == TokenKind::Op && tok(ahead).text == op;
  }
  bool at_kw(std::string_view word, std::size_t ahead = 0) const {
    return tok(ahead).kind == TokenKind::Name && tok(ahead).text == word;
  }

  void advance() {
    TokenKind k = tok().kind;
    if (k != TokenKind::Newline && k != TokenKind::Indent && k != TokenKind::Dedent &&
        k != TokenKind::EndMarker) {
      last_content_ = sig_[p_];
    }
    if (p_ + 1 < sig_.size()) ++p_;
  }

  [[noreturn]] void error(const std::string& message) const {
    throw SyntaxError(tok().line, message);
  }

  void expect_op(std::string_view op) {
    if (!at_op(op)) error("expected '" + std::string(op) + "'");
    advance();
  }
  void expect_kw(std::string_view word) {
    if (!at_kw(word)) error("expected '" + std::string(word) + "'");
    advance();
  }
  void expect(TokenKind kind, const char* what) {
    if (!at(kind)) error(std::string("expected ") + what);
    advance();
  }

  // ---- node construction -----------------------------------------------

  NodePtr start(NodeKind kind) const { return start_at(kind, p_); }

  NodePtr start_at(NodeKind kind, std::size_t pos) const {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->first_token = sig_[pos];
    n->line = toks_[sig_[pos]].line;
    return n;
  }

  NodePtr start_like(NodeKind kind, const Node& first) const {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->first_token = first.first_token;
    n->line = first.line;
    return n;
  }

  NodePtr finish(NodePtr n) const {
    n->end_token = last_content_ + 1;
    n->end_line = toks_[last_content_].end_line;
    return n;
  }

  NodePtr name_node(ExprContext ctx = ExprContext::Load) {
    if (!at(TokenKind::Name) || is_keyword(tok().text)) error("expected a name");
    auto n = start(NodeKind::Name);
    n->name = std::string(tok().text);
    n->name_token = sig_[p_];
    n->ctx = ctx;
    advance();
    return finish(std::move(n));
  }

  static void set_context(Node& n, ExprContext ctx) {
    switch (n.kind) {
      case NodeKind::Name:
        n.ctx = ctx;
        break;
      case NodeKind::Tuple:
      case NodeKind::List:
      case NodeKind::Starred:
        for (auto& c : n.children) set_context(*c, ctx);
        break;
      default:
        break;
    }
  }

  bool starts_expression(std::size_t ahead = 0) const {
    const Token& t = tok(ahead);
    switch (t.kind) {
      case TokenKind::Name:
        return !is_keyword(t.text) || t.text == "None" || t.text == "True" ||
               t.text == "False" || t.text == "not" || t.text == "lambda" ||
               t.text == "await" || t.text == "yield";
      case TokenKind::Number:
      case TokenKind::String:
      case TokenKind::FStringStart:
        return true;
      case TokenKind::Op:
        return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" ||
               t.text == "+" || t.text == "~" || t.text == "*" || t.text == "..." ||
               t.text == "**";
      default:
        return false;
    }
  }

  // ---- statements ---------------------------------------------------------

  void parse_statement(std::vector<NodePtr>& out) {
    if (at(TokenKind::Indent)) error("unexpected indent");
    if (at(TokenKind::Dedent)) error("unexpected dedent");
    if (at_op("@")) {
      out.push_back(parse_decorated());
      return;
    }
    if (at(TokenKind::Name)) {
      std::string_view w = tok().text;
      if (w == "def") {
        out.push_back(parse_funcdef(p_, {}));
        return;
      }
      if (w == "class") {
        out.push_back(parse_classdef(p_, {}));
        return;
      }
      if (w == "if") {
        out.push_back(parse_if());
        return;
      }
      if (w == "while") {
        out.push_back(parse_while());
        return;
      }
      if (w == "for") {
        out.push_back(parse_for(p_));
        return;
      }
      if (w == "try") {
        out.push_back(parse_try());
        return;
      }
      if (w == "with") {
        out.push_back(parse_with(p_));
        return;
      }
      if (w == "async") {
        std::size_t s = p_;
        if (at_kw("def", 1)) {
          out.push_back(parse_funcdef(s, {}));
          return;
        }
        advance();
        if (at_kw("for")) {
          out.push_back(parse_for(s));
          return;
        }
        if (at_kw("with")) {
          out.push_back(parse_with(s));
          return;
        }
        error("expected 'def', 'for' or 'with' after 'async'");
      }
      if (w == "match" && is_match_statement()) {
        out.push_back(parse_match());
        return;
      }
    }
    parse_simple_statements(out);
  }

  std::vector<NodePtr> parse_block() {
    expect_op(":");
    std::vector<NodePtr> body;
    if (at(TokenKind::Newline)) {
      advance();
      expect(TokenKind::Indent, "an indented block");
      while (!at(TokenKind::Dedent) && !at(TokenKind::EndMarker)) parse_statement(body);
      if (at(TokenKind::Dedent)) advance();
    } else {
      parse_simple_statements(body);
    }
    if (body.empty()) error("expected an indented block");
    return body;
  }

  NodePtr parse_decorated() {
    std::size_t s = p_;
    std::vector<NodePtr> decorators;
    while (at_op("@")) {
      advance();
      decorators.push_back(parse_named_expression());
      expect(TokenKind::Newline, "newline after decorator");
    }
    if (at_kw("def") || (at_kw("async") && at_kw("def", 1))) return parse_funcdef(s, std::move(decorators));
    if (at_kw("class")) return parse_classdef(s, std::move(decorators));
    error("expected a function or class definition after decorator");
  }

  void skip_type_params() {
    if (!at_op("[")) return;
    int depth = 0;
    do {
      if (at_op("[")) ++depth;
      if (at_op("]")) --depth;
      if (at(TokenKind::EndMarker)) error("unterminated type parameter list");
      advance();
    } while (depth > 0);
  }

  NodePtr parse_funcdef(std::size_t s, std::vector<NodePtr> decorators) {
    auto n = start_at(NodeKind::FunctionDef, s);
    n->decorators = std::move(decorators);
    if (at_kw("async")) {
      n->flag = true;
      advance();
    }
    expect_kw("def");
    if (!at(TokenKind::Name) || is_keyword(tok().text)) error("expected function name");
    n->name = std::string(tok().text);
    n->name_token = sig_[p_];
    advance();
    skip_type_params();
    expect_op("(");
    parse_parameters(")", true, n->signature);
    expect_op(")");
    if (at_op("->")) {
      advance();
      n->signature.push_back(parse_expression());
    }
    n->children = parse_block();
    return finish(std::move(n));
  }

  void parse_parameters(std::string_view closing, bool annotations, std::vector<NodePtr>& out) {
    while (!at_op(closing)) {
      if (at_op("/")) {
        advance();
      } else if (at_op("*") || at_op("**")) {
        bool star = at_op("*");
        advance();
        if (star && (at_op(",") || at_op(closing))) {
          // bare '*' separator
        } else {
          out.push_back(parse_param(annotations, star));
        }
      } else {
        out.push_back(parse_param(annotations, false));
      }
      if (!at_op(",")) break;
      advance();
    }
  }

  NodePtr parse_param(bool annotations, bool star) {
    if (!at(TokenKind::Name) || is_keyword(tok().text)) error("expected parameter name");
    auto n = start(NodeKind::Param);
    n->name = std::string(tok().text);
    n->name_token = sig_[p_];
    advance();
    if (annotations && at_op(":")) {
      advance();
      n->children.push_back(star && at_op("*") ? parse_star_expression() : parse_expression());
    }
    if (at_op("=")) {
      advance();
      n->children.push_back(parse_expression());
    }
    return finish(std::move(n));
  }

  NodePtr parse_classdef(std::size_t s, std::vector<NodePtr> decorators) {
    auto n = start_at(NodeKind::ClassDef, s);
    n->decorators = std::move(decorators);
    expect_kw("class");
    if (!at(TokenKind::Name) || is_keyword(tok().text)) error("expected class name");
    n->name = std::string(tok().text);
    n->name_token = sig_[p_];
    advance();
    skip_type_params();
    if (at_op("(")) {
      advance();
      parse_call_arguments(n->signature);
      expect_op(")");
    }
    n->children = parse_block();
    return finish(std::move(n));
  }

  NodePtr parse_if() {
    auto n = start(NodeKind::If);
    advance();  // 'if' or 'elif'
    n->children.push_back(parse_named_expression());
    for (auto& st : parse_block()) n->children.push_back(std::move(st));
    if (at_kw("elif")) {
      n->children.push_back(parse_if());
    } else if (at_kw("else")) {
      advance();
      for (auto& st : parse_block()) n->children.push_back(std::move(st));
    }
    return finish(std::move(n));
  }

  void parse_else_clause(Node& n) {
    if (!at_kw("else")) return;
    advance();
    n.flag = true;
    for (auto& st : parse_block()) n.children.push_back(std::move(st));
  }

  NodePtr parse_while() {
    auto n = start(NodeKind::While);
    advance();
    n->children.push_back(parse_named_expression());
    for (auto& st : parse_block()) n->children.push_back(std::move(st));
    parse_else_clause(*n);
    return finish(std::move(n));
  }

  NodePtr parse_for(std::size_t s) {
    auto n = start_at(NodeKind::For, s);
    expect_kw("for");
    auto target = parse_target_list();
    set_context(*target, ExprContext::Store);
    n->children.push_back(std::move(target));
    expect_kw("in");
    n->children.push_back(parse_star_expressions());
    for (auto& st : parse_block()) n->children.push_back(std::move(st));
    parse_else_clause(*n);
    return finish(std::move(n));
  }

  NodePtr parse_try() {
    auto n = start(NodeKind::Try);
    advance();
    for (auto& st : parse_block()) n->children.push_back(std::move(st));
    while (at_kw("except")) {
      auto h = start(NodeKind::ExceptHandler);
      advance();
      if (at_op("*")) advance();
      if (!at_op(":")) {
        h->children.push_back(parse_expression());
        if (at_kw("as")) {
          advance();
          if (!at(TokenKind::Name) || is_keyword(tok().text)) error("expected name after 'as'");
          h->name = std::string(tok().text);
          h->name_token = sig_[p_];
          advance();
        }
      }
      for (auto& st : parse_block()) h->children.push_back(std::move(st));
      n->children.push_back(finish(std::move(h)));
      ++n->count;
    }
    parse_else_clause(*n);
    if (at_kw("finally")) {
      advance();
      for (auto& st : parse_block()) n->children.push_back(std::move(st));
    } else if (n->count == 0) {
      error("expected 'except' or 'finally' block");
    }
    return finish(std::move(n));
  }

  // Index (in sig_) of the bracket matching the opener at p_+ahead.
  std::size_t matching_bracket(std::size_t ahead) const {
    int depth = 0;
    for (std::size_t i = p_ + ahead; i < sig_.size(); ++i) {
      const Token& t = toks_[sig_[i]];
      if (t.kind != TokenKind::Op) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") {
        if (--depth == 0) return i;
      }
    }
    return sig_.size() - 1;
  }

  NodePtr parse_with(std::size_t s) {
    auto n = start_at(NodeKind::With, s);
    expect_kw("with");
    bool parenthesized = false;
    if (at_op("(")) {
      std::size_t close = matching_bracket(0);
      const Token& after = toks_[sig_[std::min(close + 1, sig_.size() - 1)]];
      parenthesized = after.kind == TokenKind::Op && after.text == ":";
    }
    if (parenthesized) {
      advance();
      while (!at_op(")")) {
        n->children.push_back(parse_with_item());
        if (!at_op(",")) break;
        advance();
      }
      expect_op(")");
    } else {
      n->children.push_back(parse_with_item());
      while (at_op(",")) {
        advance();
        n->children.push_back(parse_with_item());
      }
    }
    for (auto& st : parse_block()) n->children.push_back(std::move(st));
    return finish(std::move(n));
  }

  NodePtr parse_with_item() {
    auto n = start(NodeKind::WithItem);
    n->children.push_back(at_kw("yield") ? parse_yield() : parse_expression());
    if (at_kw("as")) {
      advance();
      auto target = parse_star_target();
      set_context(*target, ExprContext::Store);
      n->children.push_back(std::move(target));
    }
    return finish(std::move(n));
  }

  bool is_match_statement() const {
    if (at_op(":", 1) || at_op("=", 1) || at_op(".", 1) || at(TokenKind::Newline, 1)) return false;
    int depth = 0;
    for (std::size_t i = p_ + 1; i < sig_.size(); ++i) {
      const Token& t = toks_[sig_[i]];
      if (t.kind == TokenKind::Op) {
        if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
        if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      }
      if (t.kind == TokenKind::Newline || t.kind == TokenKind::EndMarker) {
        const Token& prev = toks_[sig_[i - 1]];
        const Token& next = toks_[sig_[std::min(i + 1, sig_.size() - 1)]];
        return depth == 0 && prev.kind == TokenKind::Op && prev.text == ":" &&
               next.kind == TokenKind::Indent;
      }
    }
    return false;
  }

  NodePtr parse_match() {
    auto n = start(NodeKind::Match);
    advance();
    n->children.push_back(parse_star_expressions());
    expect_op(":");
    expect(TokenKind::Newline, "newline");
    expect(TokenKind::Indent, "an indented block of cases");
    while (at_kw("case")) {
      auto c = start(NodeKind::MatchCase);
      advance();
      auto pattern = parse_pattern_top();
      c->flag = pattern->kind == NodeKind::Name;
      c->children.push_back(std::move(pattern));
      if (at_kw("if")) {
        advance();
        c->children.push_back(parse_named_expression());
      }
      for (auto& st : parse_block()) c->children.push_back(std::move(st));
      n->children.push_back(finish(std::move(c)));
      ++n->count;
    }
    if (n->count == 0) error("expected 'case'");
    if (at(TokenKind::Dedent)) advance();
    return finish(std::move(n));
  }

  // ---- patterns (match statement) ----------------------------------------

  NodePtr parse_pattern_top() {
    auto first = parse_as_pattern();
    if (!at_op(",")) return first;
    auto t = start_like(NodeKind::Tuple, *first);
    t->children.push_back(std::move(first));
    while (at_op(",")) {
      advance();
      if (at_op(":") || at_kw("if")) break;
      t->children.push_back(parse_as_pattern());
    }
    return finish(std::move(t));
  }

  NodePtr parse_as_pattern() {
    auto p = parse_or_pattern();
    if (!at_kw("as")) return p;
    advance();
    auto n = start_like(NodeKind::MatchAs, *p);
    if (!at(TokenKind::Name) || is_keyword(tok().text)) error("expected name after 'as'");
    n->name = std::string(tok().text);
    n->name_token = sig_[p_];
    n->ctx = ExprContext::Store;
    advance();
    n->children.push_back(std::move(p));
    return finish(std::move(n));
  }

  NodePtr parse_or_pattern() {
    auto left = parse_closed_pattern();
    while (at_op("|")) {
      auto n = start_like(NodeKind::BinOp, *left);
      n->name = "|";
      advance();
      n->children.push_back(std::move(left));
      n->children.push_back(parse_closed_pattern());
      left = finish(std::move(n));
    }
    return left;
  }

  NodePtr parse_pattern_sequence(NodeKind kind, std::string_view closing) {
    auto n = start(kind);
    advance();
    while (!at_op(closing)) {
      n->children.push_back(parse_as_pattern());
      if (!at_op(",")) break;
      advance();
    }
    expect_op(closing);
    return finish(std::move(n));
  }

  NodePtr parse_closed_pattern() {
    if (at_op("(")) {
      std::size_t s = p_;
      advance();
      if (at_op(")")) {
        advance();
        return finish(start_at(NodeKind::Tuple, s));
      }
      auto inner = parse_as_pattern();
      if (!at_op(",")) {
        expect_op(")");
        return inner;
      }
      auto t = start_at(NodeKind::Tuple, s);
      t->children.push_back(std::move(inner));
      while (at_op(",")) {
        advance();
        if (at_op(")")) break;
        t->children.push_back(parse_as_pattern());
      }
      expect_op(")");
      return finish(std::move(t));
    }
    if (at_op("[")) return parse_pattern_sequence(NodeKind::List, "]");
    if (at_op("*")) {
      auto n = start(NodeKind::Starred);
      advance();
      auto target = name_node();
      if (target->name != "_") target->ctx = ExprContext::Store;
      n->children.push_back(std::move(target));
      return finish(std::move(n));
    }
    if (at_op("{")) {
      auto n = start(NodeKind::Dict);
      advance();
      while (!at_op("}")) {
        if (at_op("**")) {
          auto u = start(NodeKind::DictUnpack);
          advance();
          auto target = name_node(ExprContext::Store);
          u->children.push_back(std::move(target));
          n->children.push_back(finish(std::move(u)));
        } else {
          n->children.push_back(parse_sum());
          expect_op(":");
          n->children.push_back(parse_as_pattern());
        }
        if (!at_op(",")) break;
        advance();
      }
      expect_op("}");
      return finish(std::move(n));
    }
    if (at(TokenKind::Name) && !is_keyword(tok().text)) {
      NodePtr value = name_node();
      bool dotted = false;
      while (at_op(".")) {
        auto a = start_like(NodeKind::Attribute, *value);
        advance();
        if (!at(TokenKind::Name)) error("expected attribute name");
        a->name = std::string(tok().text);
        a->name_token = sig_[p_];
        advance();
        a->children.push_back(std::move(value));
        value = finish(std::move(a));
        dotted = true;
      }
      if (at_op("(")) {
        auto call = start_like(NodeKind::Call, *value);
        call->children.push_back(std::move(value));
        advance();
        while (!at_op(")")) {
          if (at(TokenKind::Name) && at_op("=", 1)) {
            auto kw = start(NodeKind::Keyword);
            kw->name = std::string(tok().text);
            kw->name_token = sig_[p_];
            advance();
            advance();
            kw->children.push_back(parse_as_pattern());
            call->children.push_back(finish(std::move(kw)));
          } else {
            call->children.push_back(parse_as_pattern());
          }
          if (!at_op(",")) break;
          advance();
        }
        expect_op(")");
        return finish(std::move(call));
      }
      if (!dotted && value->name != "_") value->ctx = ExprContext::Store;
      return value;
    }
    return parse_sum();
  }

  // ---- simple statements --------------------------------------------------

  void parse_simple_statements(std::vector<NodePtr>& out) {
    while (true) {
      out.push_back(parse_small_statement());
      if (!at_op(";")) break;
      advance();
      if (at(TokenKind::Newline)) break;
    }
    expect(TokenKind::Newline, "end of statement");
  }

  bool at_statement_end() const { return at(TokenKind::Newline) || at_op(";"); }

  NodePtr parse_small_statement() {
    if (at(TokenKind::Name)) {
      std::string_view w = tok().text;
      if (w == "pass" || w == "break" || w == "continue") {
        auto n = start(w == "pass" ? NodeKind::Pass : w == "break" ? NodeKind::Break : NodeKind::Continue);
        advance();
        return finish(std::move(n));
      }
      if (w == "return") {
        auto n = start(NodeKind::Return);
        advance();
        if (!at_statement_end()) n->children.push_back(parse_star_expressions());
        return finish(std::move(n));
      }
      if (w == "raise") {
        auto n = start(NodeKind::Raise);
        advance();
        if (!at_statement_end()) {
          n->children.push_back(parse_expression());
          if (at_kw("from")) {
            advance();
            n->children.push_back(parse_expression());
          }
        }
        return finish(std::move(n));
      }
      if (w == "global" || w == "nonlocal") {
        auto n = start(w == "global" ? NodeKind::Global : NodeKind::Nonlocal);
        advance();
        n->children.push_back(name_node());
        while (at_op(",")) {
          advance();
          n->children.push_back(name_node());
        }
        return finish(std::move(n));
      }
      if (w == "del") {
        auto n = start(NodeKind::Delete);
        advance();
        auto targets = parse_star_expressions();
        set_context(*targets, ExprContext::Del);
        n->children.push_back(std::move(targets));
        return finish(std::move(n));
      }
      if (w == "assert") {
        auto n = start(NodeKind::Assert);
        advance();
        n->children.push_back(parse_expression());
        if (at_op(",")) {
          advance();
          n->children.push_back(parse_expression());
        }
        return finish(std::move(n));
      }
      if (w == "import") return parse_import();
      if (w == "from") return parse_import_from();
      if (w == "type" && at(TokenKind::Name, 1) && !is_keyword(tok(1).text) &&
          (at_op("=", 2) || at_op("[", 2))) {
        auto n = start(NodeKind::TypeAlias);
        advance();
        n->children.push_back(name_node(ExprContext::Store));
        skip_type_params();
        expect_op("=");
        n->children.push_back(parse_expression());
        return finish(std::move(n));
      }
    }
    return parse_expression_statement();
  }

  NodePtr parse_alias(bool dotted) {
    auto n = start(NodeKind::Alias);
    if (!at(TokenKind::Name)) error("expected module name");
    n->name = std::string(tok().text);
    n->name_token = sig_[p_];
    n->ctx = ExprContext::Store;
    advance();
    while (dotted && at_op(".")) {
      advance();
      if (!at(TokenKind::Name)) error("expected module name");
      advance();
    }
    if (at_kw("as")) {
      advance();
      if (!at(TokenKind::Name) || is_keyword(tok().text)) error("expected name after 'as'");
      n->name = std::string(tok().text);
      n->name_token = sig_[p_];
      advance();
    }
    return finish(std::move(n));
  }

  NodePtr parse_import() {
    auto n = start(NodeKind::Import);
    advance();
    n->children.push_back(parse_alias(true));
    while (at_op(",")) {
      advance();
      n->children.push_back(parse_alias(true));
    }
    return finish(std::move(n));
  }

  NodePtr parse_import_from() {
    auto n = start(NodeKind::ImportFrom);
    advance();
    while (at_op(".") || at_op("...")) advance();
    if (!at_kw("import")) {
      if (!at(TokenKind::Name)) error("expected module name");
      advance();
      while (at_op(".")) {
        advance();
        if (!at(TokenKind::Name)) error("expected module name");
        advance();
      }
    }
    expect_kw("import");
    if (at_op("*")) {
      advance();
      return finish(std::move(n));
    }
    bool paren = at_op("(");
    if (paren) advance();
    while (true) {
      n->children.push_back(parse_alias(false));
      if (!at_op(",")) break;
      advance();
      if (paren && at_op(")")) break;
    }
    if (paren) expect_op(")");
    return finish(std::move(n));
  }

  bool at_aug_assign() const {
    if (!at(TokenKind::Op)) return false;
    return std::find(kAugAssignOps.begin(), kAugAssignOps.end(), tok().text) != kAugAssignOps.end();
  }

  NodePtr parse_assignment_value() {
    return at_kw("yield") ? parse_yield() : parse_star_expressions();
  }

  NodePtr parse_expression_statement() {
    std::size_t s = p_;
    auto first = parse_assignment_value();
    if (at_op(":")) {
      auto n = start_at(NodeKind::AnnAssign, s);
      advance();
      set_context(*first, ExprContext::Store);
      n->children.push_back(std::move(first));
      n->children.push_back(parse_expression());
      if (at_op("=")) {
        advance();
        n->children.push_back(parse_assignment_value());
      }
      return finish(std::move(n));
    }
    if (at_aug_assign()) {
      auto n = start_at(NodeKind::AugAssign, s);
      n->name = std::string(tok().text);
      advance();
      set_context(*first, ExprContext::Store);
      n->children.push_back(std::move(first));
      n->children.push_back(parse_assignment_value());
      return finish(std::move(n));
    }
    if (at_op("=")) {
      auto n = start_at(NodeKind::Assign, s);
      n->children.push_back(std::move(first));
      while (at_op("=")) {
        advance();
        n->children.push_back(parse_assignment_value());
      }
      for (std::size_t i = 0; i + 1 < n->children.size(); ++i)
        set_context(*n->children[i], ExprContext::Store);
      return finish(std::move(n));
    }
    auto n = start_at(NodeKind::ExprStmt, s);
    n->children.push_back(std::move(first));
    return finish(std::move(n));
  }

  // ---- expressions ----------------------------------------------------------

  NodePtr parse_yield() {
    auto n = start(NodeKind::Yield);
    advance();
    if (at_kw("from")) {
      n->kind = NodeKind::YieldFrom;
      advance();
      n->children.push_back(parse_expression());
    } else if (starts_expression()) {
      n->children.push_back(parse_star_expressions());
    }
    return finish(std::move(n));
  }

  NodePtr parse_star_expressions() {
    auto first = parse_star_expression();
    if (!at_op(",")) return first;
    auto t = start_like(NodeKind::Tuple, *first);
    t->children.push_back(std::move(first));
    while (at_op(",")) {
      advance();
      if (!starts_expression()) break;
      t->children.push_back(parse_star_expression());
    }
    return finish(std::move(t));
  }

  NodePtr parse_star_expression() {
    if (at_op("*")) {
      auto n = start(NodeKind::Starred);
      advance();
      n->children.push_back(parse_bitor());
      return finish(std::move(n));
    }
    return parse_named_expression();
  }

  NodePtr parse_star_target() {
    if (at_op("*")) {
      auto n = start(NodeKind::Starred);
      advance();
      n->children.push_back(parse_bitor());
      return finish(std::move(n));
    }
    return parse_bitor();
  }

  // Targets of `for` loops and comprehensions; stops before `in`.
  NodePtr parse_target_list() {
    auto first = parse_star_target();
    if (!at_op(",")) return first;
    auto t = start_like(NodeKind::Tuple, *first);
    t->children.push_back(std::move(first));
    while (at_op(",")) {
      advance();
      if (at_kw("in")) break;
      t->children.push_back(parse_star_target());
    }
    return finish(std::move(t));
  }

  NodePtr parse_named_expression() {
    if (at(TokenKind::Name) && at_op(":=", 1)) {
      auto n = start(NodeKind::NamedExpr);
      n->children.push_back(name_node(ExprContext::Store));
      advance();
      n->children.push_back(parse_expression());
      return finish(std::move(n));
    }
    return parse_expression();
  }

  NodePtr parse_expression() {
    if (at_kw("lambda")) return parse_lambda();
    auto body = parse_disjunction();
    if (!at_kw("if")) return body;
    auto n = start_like(NodeKind::IfExp, *body);
    advance();
    n->children.push_back(std::move(body));
    n->children.push_back(parse_disjunction());
    expect_kw("else");
    n->children.push_back(parse_expression());
    return finish(std::move(n));
  }

  NodePtr parse_lambda() {
    auto n = start(NodeKind::Lambda);
    advance();
    parse_parameters(":", false, n->children);
    expect_op(":");
    n->children.push_back(parse_expression());
    return finish(std::move(n));
  }

  template <typename Next>
  NodePtr parse_bool(std::string_view op, Next next) {
    auto first = (this->*next)();
    if (!at_kw(op)) return first;
    auto n = start_like(NodeKind::BoolOp, *first);
    n->name = std::string(op);
    n->children.push_back(std::move(first));
    while (at_kw(op)) {
      advance();
      n->children.push_back((this->*next)());
    }
    n->count = static_cast<int>(n->children.size());
    return finish(std::move(n));
  }

  NodePtr parse_disjunction() { return parse_bool("or", &Parser::parse_conjunction); }
  NodePtr parse_conjunction() { return parse_bool("and", &Parser::parse_inversion); }

  NodePtr parse_inversion() {
    if (at_kw("not")) {
      auto n = start(NodeKind::UnaryOp);
      n->name = "not";
      advance();
      n->children.push_back(parse_inversion());
      return finish(std::move(n));
    }
    return parse_comparison();
  }

  bool at_comparison_op() const {
    if (at(TokenKind::Op)) {
      std::string_view t = tok().text;
      return t == "<" || t == ">" || t == "==" || t == ">=" || t == "<=" || t == "!=" || t == "<>";
    }
    return at_kw("in") || at_kw("is") || (at_kw("not") && at_kw("in", 1));
  }

  NodePtr parse_comparison() {
    auto first = parse_bitor();
    if (!at_comparison_op()) return first;
    auto n = start_like(NodeKind::Compare, *first);
    n->children.push_back(std::move(first));
    while (at_comparison_op()) {
      if (at_kw("not") || (at_kw("is") && at_kw("not", 1))) advance();
      advance();
      n->children.push_back(parse_bitor());
    }
    return finish(std::move(n));
  }

  template <typename Next>
  NodePtr parse_binary(std::initializer_list<std::string_view> ops, Next next) {
    auto left = (this->*next)();
    while (at(TokenKind::Op) && std::find(ops.begin(), ops.end(), tok().text) != ops.end()) {
      auto n = start_like(NodeKind::BinOp, *left);
      n->name = std::string(tok().text);
      advance();
      n->children.push_back(std::move(left));
      n->children.push_back((this->*next)());
      left = finish(std::move(n));
    }
    return left;
  }

  NodePtr parse_bitor() { return parse_binary({"|"}, &Parser::parse_bitxor); }
  NodePtr parse_bitxor() { return parse_binary({"^"}, &Parser::parse_bitand); }
  NodePtr parse_bitand() { return parse_binary({"&"}, &Parser::parse_shift); }
  NodePtr parse_shift() { return parse_binary({"<<", ">>"}, &Parser::parse_sum); }
  NodePtr parse_sum() { return parse_binary({"+", "-"}, &Parser::parse_term); }
  NodePtr parse_term() { return parse_binary({"*", "/", "//", "%", "@"}, &Parser::parse_factor); }

  NodePtr parse_factor() {
    if (at_op("+") || at_op("-") || at_op("~")) {
      auto n = start(NodeKind::UnaryOp);
      n->name = std::string(tok().text);
      advance();
      n->children.push_back(parse_factor());
      return finish(std::move(n));
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base;
    if (at_kw("await")) {
      auto n = start(NodeKind::Await);
      advance();
      n->children.push_back(parse_primary());
      base = finish(std::move(n));
    } else {
      base = parse_primary();
    }
    if (!at_op("**")) return base;
    auto n = start_like(NodeKind::BinOp, *base);
    n->name = "**";
    advance();
    n->children.push_back(std::move(base));
    n->children.push_back(parse_factor());
    return finish(std::move(n));
  }

  NodePtr parse_primary() {
    auto value = parse_atom();
    while (true) {
      if (at_op(".")) {
        auto n = start_like(NodeKind::Attribute, *value);
        advance();
        if (!at(TokenKind::Name)) error("expected attribute name");
        n->name = std::string(tok().text);
        n->name_token = sig_[p_];
        advance();
        n->children.push_back(std::move(value));
        value = finish(std::move(n));
      } else if (at_op("(")) {
        auto n = start_like(NodeKind::Call, *value);
        advance();
        n->children.push_back(std::move(value));
        parse_call_arguments(n->children);
        expect_op(")");
        value = finish(std::move(n));
      } else if (at_op("[")) {
        auto n = start_like(NodeKind::Subscript, *value);
        advance();
        n->children.push_back(std::move(value));
        n->children.push_back(parse_slices());
        expect_op("]");
        value = finish(std::move(n));
      } else {
        return value;
      }
    }
  }

  void parse_call_arguments(std::vector<NodePtr>& out) {
    while (!at_op(")")) {
      if (at_op("**")) {
        auto kw = start(NodeKind::Keyword);
        advance();
        kw->children.push_back(parse_expression());
        out.push_back(finish(std::move(kw)));
      } else if (at_op("*")) {
        auto star = start(NodeKind::Starred);
        advance();
        star->children.push_back(parse_expression());
        out.push_back(finish(std::move(star)));
      } else if (at(TokenKind::Name) && at_op("=", 1)) {
        auto kw = start(NodeKind::Keyword);
        kw->name = std::string(tok().text);
        kw->name_token = sig_[p_];
        advance();
        advance();
        kw->children.push_back(parse_expression());
        out.push_back(finish(std::move(kw)));
      } else {
        auto arg = parse_named_expression();
        if (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
          auto g = start_like(NodeKind::GeneratorExp, *arg);
          g->children.push_back(std::move(arg));
          parse_comprehensions(*g);
          arg = finish(std::move(g));
        }
        out.push_back(std::move(arg));
      }
      if (!at_op(",")) break;
      advance();
    }
  }

  NodePtr parse_slice() {
    if (at_op("*")) return parse_star_expression();
    std::size_t s = p_;
    NodePtr lower;
    if (!at_op(":")) {
      lower = parse_named_expression();
      if (!at_op(":")) return lower;
    }
    auto n = start_at(NodeKind::Slice, s);
    if (lower) n->children.push_back(std::move(lower));
    advance();  // ':'
    if (!at_op(":") && !at_op("]") && !at_op(",")) n->children.push_back(parse_expression());
    if (at_op(":")) {
      advance();
      if (!at_op("]") && !at_op(",")) n->children.push_back(parse_expression());
    }
    return finish(std::move(n));
  }

  NodePtr parse_slices() {
    auto first = parse_slice();
    if (!at_op(",")) return first;
    auto t = start_like(NodeKind::Tuple, *first);
    t->children.push_back(std::move(first));
    while (at_op(",")) {
      advance();
      if (at_op("]")) break;
      t->children.push_back(parse_slice());
    }
    return finish(std::move(t));
  }

  void parse_comprehensions(Node& owner) {
    while (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
      auto c = start(NodeKind::Comprehension);
      if (at_kw("async")) advance();
      advance();
      auto target = parse_target_list();
      set_context(*target, ExprContext::Store);
      c->children.push_back(std::move(target));
      expect_kw("in");
      c->children.push_back(parse_disjunction());
      while (at_kw("if")) {
        advance();
        c->children.push_back(parse_disjunction());
        ++c->count;
      }
      owner.children.push_back(finish(std::move(c)));
    }
  }

  bool at_comprehension() const { return at_kw("for") || (at_kw("async") && at_kw("for", 1)); }

  NodePtr parse_atom() {
    const Token& t = tok();
    switch (t.kind) {
      case TokenKind::Name: {
        if (t.text == "None" || t.text == "True" || t.text == "False") {
          auto n = start(NodeKind::Constant);
          n->name = std::string(t.text);
          advance();
          return finish(std::move(n));
        }
        if (t.text == "yield") error("'yield' outside parentheses");
        if (is_keyword(t.text)) error("invalid syntax near '" + std::string(t.text) + "'");
        return name_node();
      }
      case TokenKind::Number: {
        auto n = start(NodeKind::Constant);
        n->name = std::string(t.text);
        advance();
        return finish(std::move(n));
      }
      case TokenKind::String:
      case TokenKind::FStringStart:
        return parse_strings();
      case TokenKind::Op:
        if (t.text == "(") return parse_paren();
        if (t.text == "[") return parse_list();
        if (t.text == "{") return parse_brace();
        if (t.text == "...") {
          auto n = start(NodeKind::Constant);
          n->name = "...";
          advance();
          return finish(std::move(n));
        }
        break;
      default:
        break;
    }
    error("invalid syntax");
  }

  NodePtr parse_strings() {
    auto n = start(NodeKind::Constant);
    bool joined = false;
    while (at(TokenKind::String) || at(TokenKind::FStringStart)) {
      if (at(TokenKind::String)) {
        n->name += std::string(tok().text);
        advance();
        continue;
      }
      joined = true;
      advance();
      while (!at(TokenKind::FStringEnd)) {
        if (at(TokenKind::FStringMiddle)) {
          advance();
        } else if (at_op("{")) {
          n->children.push_back(parse_fstring_field());
        } else {
          error("malformed f-string");
        }
      }
      advance();
    }
    if (joined) {
      n->kind = NodeKind::JoinedStr;
      n->name.clear();
    }
    return finish(std::move(n));
  }

  NodePtr parse_fstring_field() {
    auto n = start(NodeKind::FormattedValue);
    expect_op("{");
    n->children.push_back(at_kw("yield") ? parse_yield() : parse_star_expressions());
    if (at_op("=")) advance();
    if (at_op("!")) {
      advance();
      if (!at(TokenKind::Name)) error("f-string: invalid conversion character");
      advance();
    }
    if (at_op(":")) {
      advance();
      while (!at_op("}")) {
        if (at(TokenKind::FStringMiddle)) {
          advance();
        } else if (at_op("{")) {
          n->children.push_back(parse_fstring_field());
        } else {
          error("f-string: expecting '}'");
        }
      }
    }
    expect_op("}");
    return finish(std::move(n));
  }

  NodePtr parse_paren() {
    std::size_t s = p_;
    advance();
    if (at_op(")")) {
      advance();
      return finish(start_at(NodeKind::Tuple, s));
    }
    if (at_kw("yield")) {
      auto y = parse_yield();
      expect_op(")");
      return y;
    }
    auto first = parse_star_expression();
    if (at_comprehension()) {
      auto g = start_at(NodeKind::GeneratorExp, s);
      g->children.push_back(std::move(first));
      parse_comprehensions(*g);
      expect_op(")");
      return finish(std::move(g));
    }
    if (!at_op(",")) {
      expect_op(")");
      return first;
    }
    auto t = start_at(NodeKind::Tuple, s);
    t->children.push_back(std::move(first));
    while (at_op(",")) {
      advance();
      if (at_op(")")) break;
      t->children.push_back(parse_star_expression());
    }
    expect_op(")");
    return finish(std::move(t));
  }

  NodePtr parse_list() {
    auto n = start(NodeKind::List);
    advance();
    if (!at_op("]")) {
      n->children.push_back(parse_star_expression());
      if (at_comprehension()) {
        n->kind = NodeKind::ListComp;
        parse_comprehensions(*n);
      } else {
        while (at_op(",")) {
          advance();
          if (at_op("]")) break;
          n->children.push_back(parse_star_expression());
        }
      }
    }
    expect_op("]");
    return finish(std::move(n));
  }

  NodePtr parse_dict_unpack() {
    auto u = start(NodeKind::DictUnpack);
    advance();
    u->children.push_back(parse_bitor());
    return finish(std::move(u));
  }

  NodePtr parse_brace() {
    auto n = start(NodeKind::Dict);
    advance();
    if (at_op("}")) {
      advance();
      return finish(std::move(n));
    }
    NodePtr first = at_op("**") ? parse_dict_unpack() : parse_star_expression();
    bool is_dict = first->kind == NodeKind::DictUnpack || at_op(":");
    if (is_dict) {
      n->children.push_back(std::move(first));
      if (at_op(":")) {
        advance();
        n->children.push_back(parse_expression());
      }
      if (at_comprehension()) {
        n->kind = NodeKind::DictComp;
        parse_comprehensions(*n);
      } else {
        while (at_op(",")) {
          advance();
          if (at_op("}")) break;
          if (at_op("**")) {
            n->children.push_back(parse_dict_unpack());
            continue;
          }
          n->children.push_back(parse_expression());
          expect_op(":");
          n->children.push_back(parse_expression());
        }
      }
    } else {
      n->kind = NodeKind::Set;
      n->children.push_back(std::move(first));
      if (at_comprehension()) {
        n->kind = NodeKind::SetComp;
        parse_comprehensions(*n);
      } else {
        while (at_op(",")) {
          advance();
          if (at_op("}")) break;
          n->children.push_back(parse_star_expression());
        }
      }
    }
    expect_op("}");
    return finish(std::move(n));
  }

  const std::vector<Token>& toks_;
  std::vector<std::size_t> sig_;
  std::size_t p_ = 0;
  std::size_t last_content_ = 0;
};

}  // namespace

Module parse(std::string source, const ParseOptions& options) {
  Module module;
  module.source = std::make_shared<const std::string>(std::move(source));
  LexOptions lex_options;
  lex_options.relative_indentation = options.relative_indentation;
  LexResult lexed = tokenize(*module.source, lex_options);
  if (lexed.status != LexStatus::Ok) throw SyntaxError(lexed.error_line, lexed.error);
  module.tokens = std::move(lexed.tokens);
  module.body = Parser(module.tokens).parse_module();
  return module;
}

}  // namespace redline::python
