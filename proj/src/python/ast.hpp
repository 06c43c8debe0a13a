#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "python/lexer.hpp"

namespace redline::python {

enum class NodeKind : std::uint8_t {
  // statements
  FunctionDef,
  ClassDef,
  If,
  For,
  While,
  Try,
  ExceptHandler,
  With,
  WithItem,
  Match,
  MatchCase,
  MatchAs,
  Assert,
  Return,
  Delete,
  Assign,
  AugAssign,
  AnnAssign,
  ExprStmt,
  Pass,
  Break,
  Continue,
  Raise,
  Global,
  Nonlocal,
  Import,
  ImportFrom,
  Alias,
  TypeAlias,
  // expressions
  BoolOp,
  NamedExpr,
  BinOp,
  UnaryOp,
  Lambda,
  IfExp,
  Dict,
  DictUnpack,
  Set,
  ListComp,
  SetComp,
  DictComp,
  GeneratorExp,
  Comprehension,
  Await,
  Yield,
  YieldFrom,
  Compare,
  Call,
  Keyword,
  FormattedValue,
  JoinedStr,
  Constant,
  Attribute,
  Subscript,
  Slice,
  Starred,
  Name,
  List,
  Tuple,
  // function signatures
  Param,
};

enum class ExprContext : std::uint8_t { Load, Store, Del };

inline constexpr std::size_t kNoToken = std::numeric_limits<std::size_t>::max();

struct Node;
using NodePtr = std::unique_ptr<Node>;

/// One syntax tree node. Field use depends on `kind`:
///  - `name`: identifier of Name/Param/Attribute/Keyword/Alias/ExceptHandler
///    (the `as` target)/MatchAs, def/class name, operator of BinOp/UnaryOp/BoolOp.
///  - `flag`: For/While/Try have an `else` clause; MatchCase pattern is a
///    bare capture or wildcard; FunctionDef is async.
///  - `count`: BoolOp operands, Comprehension `if` clauses, Try handlers,
///    Match cases.
///  - `children`: every sub-node in source order; for FunctionDef and
///    ClassDef only the body statements.
///  - `decorators`, `signature`: FunctionDef/ClassDef header parts.
struct Node {
  NodeKind kind;
  int line = 0;
  int end_line = 0;
  std::size_t first_token = 0;
  std::size_t end_token = 0;  // one past the last token
  std::string name;
  std::size_t name_token = kNoToken;
  ExprContext ctx = ExprContext::Load;
  bool flag = false;
  int count = 0;
  std::vector<NodePtr> children;
  std::vector<NodePtr> decorators;
  std::vector<NodePtr> signature;
};

struct SyntaxError : std::runtime_error {
  SyntaxError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line(line) {}
  int line;
};

/// A parsed module. Owns the source text the tokens point into.
struct Module {
  std::shared_ptr<const std::string> source;
  std::vector<Token> tokens;
  std::vector<NodePtr> body;
};

struct ParseOptions {
  // Accept a uniformly indented fragment (e.g. a method sliced out of a class).
  bool relative_indentation = false;
};

/// Parse Python 3 source. Throws SyntaxError.
Module parse(std::string source, const ParseOptions& options = {});

}  // namespace redline::python
