#include <gtest/gtest.h>

#include <string>

#include "python/ast.hpp"

namespace py = redline::python;

namespace {

int count_kind(const py::Node& n, py::NodeKind kind) {
  int total = n.kind == kind ? 1 : 0;
  for (const auto& c : n.children) total += count_kind(*c, kind);
  for (const auto& c : n.decorators) total += count_kind(*c, kind);
  for (const auto& c : n.signature) total += count_kind(*c, kind);
  return total;
}

int count_kind(const py::Module& m, py::NodeKind kind) {
  int total = 0;
  for (const auto& n : m.body) total += count_kind(*n, kind);
  return total;
}

}  // namespace

TEST(Lexer, IndentDedentPairs) {
  auto r = py::tokenize("def f():\n    if x:\n        pass\n    return 1\n");
  ASSERT_EQ(r.status, py::LexStatus::Ok);
  int indents = 0, dedents = 0;
  for (const auto& t : r.tokens) {
    indents += t.kind == py::TokenKind::Indent;
    dedents += t.kind == py::TokenKind::Dedent;
  }
  EXPECT_EQ(indents, 2);
  EXPECT_EQ(dedents, 2);
}

TEST(Lexer, IncompleteAndInvalid) {
  EXPECT_EQ(py::tokenize("foo(a,").status, py::LexStatus::Incomplete);
  EXPECT_EQ(py::tokenize("x = '''abc\n").status, py::LexStatus::Incomplete);
  EXPECT_EQ(py::tokenize("x = 'abc\n").status, py::LexStatus::Invalid);
  EXPECT_EQ(py::tokenize("a $ b\n").status, py::LexStatus::Invalid);
  EXPECT_EQ(py::tokenize("x = 1 + \\").status, py::LexStatus::Incomplete);
}

TEST(Lexer, FStringStructure) {
  auto r = py::tokenize("f'a{b!r:>{w}}c{{d}}'\n");
  ASSERT_EQ(r.status, py::LexStatus::Ok);
  EXPECT_EQ(r.tokens.front().kind, py::TokenKind::FStringStart);
  auto flat = py::tokenize("f'a{b!r:>{w}}c'\n", {.fstrings_as_strings = true});
  ASSERT_EQ(flat.status, py::LexStatus::Ok);
  EXPECT_EQ(flat.tokens.front().kind, py::TokenKind::String);
}

TEST(Parser, FunctionAndClassShapes) {
  auto m = py::parse(
      "import os\n"
      "@dec(1)\n"
      "class A(B, metaclass=M):\n"
      "    x: int = 3\n"
      "    async def m(self, a, /, b=2, *args, c: 'T' = None, **kw) -> R:\n"
      "        async with x as (y, z), w:\n"
      "            await q\n"
      "        return [i async for i in g if i]\n");
  ASSERT_EQ(m.body.size(), 2u);
  const auto& cls = *m.body[1];
  EXPECT_EQ(cls.kind, py::NodeKind::ClassDef);
  EXPECT_EQ(cls.line, 2);
  EXPECT_EQ(cls.end_line, 8);
  ASSERT_EQ(cls.children.size(), 2u);
  const auto& fn = *cls.children[1];
  EXPECT_EQ(fn.kind, py::NodeKind::FunctionDef);
  EXPECT_TRUE(fn.flag);
  EXPECT_EQ(fn.name, "m");
  EXPECT_EQ(count_kind(fn, py::NodeKind::Param), 6);
}

TEST(Parser, ControlFlowCounts) {
  auto m = py::parse(
      "def f(a, b):\n"
      "    if a and b or c:\n"
      "        pass\n"
      "    elif a:\n"
      "        pass\n"
      "    else:\n"
      "        pass\n"
      "    for i in range(3):\n"
      "        continue\n"
      "    else:\n"
      "        pass\n"
      "    try:\n"
      "        x = 1\n"
      "    except (A, B) as e:\n"
      "        raise\n"
      "    except C:\n"
      "        pass\n"
      "    else:\n"
      "        pass\n"
      "    finally:\n"
      "        pass\n"
      "    return x if a else b\n");
  const auto& fn = *m.body[0];
  EXPECT_EQ(count_kind(fn, py::NodeKind::If), 2);
  EXPECT_EQ(count_kind(fn, py::NodeKind::BoolOp), 2);
  EXPECT_EQ(count_kind(fn, py::NodeKind::IfExp), 1);
  EXPECT_EQ(count_kind(fn, py::NodeKind::ExceptHandler), 2);
}

TEST(Parser, MatchStatement) {
  auto m = py::parse(
      "match cmd:\n"
      "    case [x, *rest] if x:\n"
      "        pass\n"
      "    case {'k': v, **kw}:\n"
      "        pass\n"
      "    case Point(x=0, y=yy) | None:\n"
      "        pass\n"
      "    case _:\n"
      "        pass\n"
      "match = 3\n");
  ASSERT_EQ(m.body.size(), 2u);
  const auto& match = *m.body[0];
  EXPECT_EQ(match.kind, py::NodeKind::Match);
  EXPECT_EQ(match.count, 4);
  EXPECT_FALSE(match.children[1]->flag);
  EXPECT_TRUE(match.children[4]->flag);
  EXPECT_EQ(m.body[1]->kind, py::NodeKind::Assign);
}

TEST(Parser, ExpressionsAndFStrings) {
  auto m = py::parse(
      "x = {**a, 'b': [y for y in z if y if not y]}\n"
      "s = f\"{x!r:>{width}} {y=}\" 'tail'\n"
      "t = lambda a, *b, c=1, **d: (yield)\n"
      "u = a[1:2, ::3, ...]\n"
      "if (n := len(a)) > 10: pass\n"
      "del a[0], b\n"
      "print(*args, sep='', **kw)\n"
      "v = not a in b is not c\n");
  EXPECT_EQ(m.body.size(), 8u);
  EXPECT_EQ(count_kind(m, py::NodeKind::FormattedValue), 3);
  EXPECT_EQ(count_kind(m, py::NodeKind::Comprehension), 1);
  EXPECT_EQ(count_kind(m, py::NodeKind::NamedExpr), 1);
}

TEST(Parser, RelativeIndentation) {
  std::string body = "    def m(self):\n        return 1\n";
  EXPECT_THROW(py::parse(body), py::SyntaxError);
  auto m = py::parse(body, {.relative_indentation = true});
  ASSERT_EQ(m.body.size(), 1u);
  EXPECT_EQ(m.body[0]->name, "m");
}

TEST(Parser, SyntaxErrors) {
  EXPECT_THROW(py::parse("def f(:\n  pass\n"), py::SyntaxError);
  EXPECT_THROW(py::parse("print 'x'\n"), py::SyntaxError);
  EXPECT_THROW(py::parse("if x:\npass\n"), py::SyntaxError);
  EXPECT_THROW(py::parse("x = (1,\n"), py::SyntaxError);
}
