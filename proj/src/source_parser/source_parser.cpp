#include "source_parser/source_parser.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace redline::source {

namespace py = python;
using py::Node;
using py::NodeKind;

namespace {

// Byte offset of the start of every physical line, plus a final entry at
// the end of the text. Terminators match the lexer: \r\n, \r, \n.
std::vector<std::size_t> line_starts(std::string_view text) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
    if (text[i] == '\n' || text[i] == '\r') starts.push_back(i + 1);
  }
  if (starts.back() != text.size()) starts.push_back(text.size());
  return starts;
}

std::string slice_lines(std::string_view text, const std::vector<std::size_t>& starts, int first,
                        int last) {
  std::size_t lines = starts.size() - 1;
  std::size_t a = starts[std::min<std::size_t>(first - 1, lines)];
  std::size_t b = starts[std::min<std::size_t>(last, lines)];
  return std::string(text.substr(a, b - a));
}

template <typename F>
void for_each_child(const Node& n, F&& f) {
  for (const auto& c : n.decorators) f(*c);
  for (const auto& c : n.signature) f(*c);
  for (const auto& c : n.children) f(*c);
}

int decision_points(const Node& n) {
  switch (n.kind) {
    case NodeKind::FunctionDef:
    case NodeKind::ClassDef:
      return 0;
    case NodeKind::Assert:
      return 1;
    default:
      break;
  }
  int total = 0;
  switch (n.kind) {
    case NodeKind::If:
    case NodeKind::IfExp:
      total = 1;
      break;
    case NodeKind::BoolOp:
      total = n.count - 1;
      break;
    case NodeKind::For:
    case NodeKind::While:
      total = 1 + (n.flag ? 1 : 0);
      break;
    case NodeKind::Comprehension:
      total = 1 + n.count;
      break;
    case NodeKind::Try:
      total = n.count + (n.flag ? 1 : 0);
      break;
    case NodeKind::Match: {
      bool wildcard = std::any_of(n.children.begin(), n.children.end(), [](const auto& c) {
        return c->kind == NodeKind::MatchCase && c->flag;
      });
      total = std::max(0, n.count - (wildcard ? 1 : 0));
      break;
    }
    default:
      break;
  }
  for (const auto& c : n.children) total += decision_points(*c);
  return total;
}

class Extractor {
 public:
  Extractor(const py::Module& module, std::string_view file_path, const ExtractOptions& options)
      : module_(module), file_path_(file_path), options_(options),
        starts_(line_starts(*module.source)) {}

  std::vector<FunctionUnit> run() {
    for (const auto& st : module_.body) visit(*st, "", false);
    std::sort(units_.begin(), units_.end(), [](const FunctionUnit& a, const FunctionUnit& b) {
      if (a.span.start_line != b.span.start_line) return a.span.start_line < b.span.start_line;
      return a.qualified_name < b.qualified_name;
    });
    return std::move(units_);
  }

 private:
  void visit(const Node& n, const std::string& scope, bool in_function) {
    if (n.kind == NodeKind::FunctionDef || n.kind == NodeKind::ClassDef) {
      std::string qualified = scope.empty() ? n.name : scope + "." + n.name;
      if (n.kind == NodeKind::FunctionDef) {
        if (options_.include_nested || !in_function) emit(n, scope, qualified, in_function);
        for (const auto& c : n.children) visit(*c, qualified, true);
      } else {
        for (const auto& c : n.children) visit(*c, qualified, in_function);
      }
      return;
    }
    for (const auto& c : n.children) visit(*c, scope, in_function);
  }

  void emit(const Node& fn, const std::string& scope, const std::string& qualified, bool nested) {
    FunctionUnit u;
    u.qualified_name = qualified;
    u.name = fn.name;
    u.scope = scope;
    u.file_path = std::string(file_path_);
    u.span = {fn.line, fn.end_line};
    u.body_text = slice_lines(*module_.source, starts_, fn.line, fn.end_line);
    u.normalized_tokens = normalize_function(module_, fn);
    for (const auto& t : u.normalized_tokens) {
      if (!u.normalized_body.empty()) u.normalized_body += ' ';
      u.normalized_body += t;
    }
    u.complexity = function_complexity(fn);
    u.nested = nested;
    units_.push_back(std::move(u));
  }

  const py::Module& module_;
  std::string_view file_path_;
  const ExtractOptions& options_;
  std::vector<std::size_t> starts_;
  std::vector<FunctionUnit> units_;
};

void collect_bindings(const Node& n, std::set<std::string>& locals, std::set<std::string>& globals) {
  switch (n.kind) {
    case NodeKind::Param:
    case NodeKind::Alias:
      locals.insert(n.name);
      break;
    case NodeKind::Name:
      if (n.ctx != py::ExprContext::Load) locals.insert(n.name);
      break;
    case NodeKind::ExceptHandler:
    case NodeKind::MatchAs:
      if (n.name_token != py::kNoToken) locals.insert(n.name);
      break;
    case NodeKind::FunctionDef:
    case NodeKind::ClassDef:
      locals.insert(n.name);
      break;
    case NodeKind::Global:
      for (const auto& c : n.children) globals.insert(c->name);
      return;
    case NodeKind::Nonlocal:
      return;
    default:
      break;
  }
  for_each_child(n, [&](const Node& c) { collect_bindings(c, locals, globals); });
}

constexpr const char* kSelfName = "<name>";

void collect_renames(const Node& n, const std::string& own_name, const std::set<std::string>& locals,
                     std::unordered_map<std::size_t, std::string>& renames) {
  switch (n.kind) {
    case NodeKind::Name:
      if (locals.count(n.name)) {
        renames[n.name_token] = n.name;
      } else if (n.name == own_name) {
        renames[n.name_token] = kSelfName;
      }
      break;
    case NodeKind::Param:
    case NodeKind::Alias:
    case NodeKind::ExceptHandler:
    case NodeKind::MatchAs:
    case NodeKind::FunctionDef:
    case NodeKind::ClassDef:
      if (n.name_token != py::kNoToken && locals.count(n.name)) renames[n.name_token] = n.name;
      break;
    default:
      break;
  }
  for_each_child(n, [&](const Node& c) { collect_renames(c, own_name, locals, renames); });
}

}  // namespace

int function_complexity(const Node& fn) {
  int total = 1;
  for (const auto& st : fn.children) total += decision_points(*st);
  return total;
}

std::vector<std::string> normalize_function(const py::Module& module, const Node& fn) {
  std::set<std::string> locals;
  std::set<std::string> globals;
  for (const auto& c : fn.signature) collect_bindings(*c, locals, globals);
  for (const auto& c : fn.children) collect_bindings(*c, locals, globals);
  for (const auto& g : globals) locals.erase(g);

  std::unordered_map<std::size_t, std::string> renames;
  renames[fn.name_token] = kSelfName;
  for_each_child(fn, [&](const Node& c) { collect_renames(c, fn.name, locals, renames); });

  std::vector<std::string> out;
  std::map<std::string, int> numbering;
  int open_blocks = 0;
  for (std::size_t i = fn.first_token; i < fn.end_token && i < module.tokens.size(); ++i) {
    const py::Token& t = module.tokens[i];
    switch (t.kind) {
      case py::TokenKind::Comment:
      case py::TokenKind::NL:
      case py::TokenKind::EndMarker:
        continue;
      case py::TokenKind::Newline:
        out.emplace_back(";");
        continue;
      case py::TokenKind::Indent:
        ++open_blocks;
        out.emplace_back("{");
        continue;
      case py::TokenKind::Dedent:
        --open_blocks;
        out.emplace_back("}");
        continue;
      default:
        break;
    }
    auto it = renames.find(i);
    if (it == renames.end()) {
      out.emplace_back(t.text);
    } else if (it->second == kSelfName) {
      out.emplace_back(kSelfName);
    } else {
      auto [slot, inserted] = numbering.try_emplace(it->second, static_cast<int>(numbering.size()));
      out.push_back("v" + std::to_string(slot->second));
    }
  }
  for (; open_blocks > 0; --open_blocks) out.emplace_back("}");
  return out;
}

std::vector<FunctionUnit> extract_functions(std::string_view source, std::string_view file_path,
                                            const ExtractOptions& options) {
  py::Module module = py::parse(std::string(source));
  return Extractor(module, file_path, options).run();
}

std::string strip_docstring(const std::string& body_text) {
  py::Module module;
  try {
    module = py::parse(body_text, {.relative_indentation = true});
  } catch (const py::SyntaxError&) {
    return body_text;
  }
  if (module.body.empty() || module.body[0]->kind != NodeKind::FunctionDef) return body_text;
  const Node& fn = *module.body[0];
  const Node& first = *fn.children.front();
  if (first.kind != NodeKind::ExprStmt || first.children.front()->kind != NodeKind::Constant ||
      module.tokens[first.first_token].kind != py::TokenKind::String) {
    return body_text;
  }
  // The docstring must sit on its own lines.
  std::size_t colon = first.first_token;
  while (colon > 0) {
    py::TokenKind k = module.tokens[--colon].kind;
    if (k != py::TokenKind::NL && k != py::TokenKind::Comment && k != py::TokenKind::Newline &&
        k != py::TokenKind::Indent)
      break;
  }
  if (module.tokens[colon].end_line == first.line) return body_text;
  if (fn.children.size() > 1 && fn.children[1]->line == first.end_line) return body_text;

  auto starts = line_starts(body_text);
  std::string out = slice_lines(body_text, starts, 1, first.line - 1);
  if (fn.children.size() == 1) {
    std::string indent;
    std::size_t line_begin = starts[first.line - 1];
    while (line_begin + indent.size() < body_text.size() &&
           (body_text[line_begin + indent.size()] == ' ' || body_text[line_begin + indent.size()] == '\t'))
      indent += body_text[line_begin + indent.size()];
    out += indent + "pass\n";
  }
  out += slice_lines(body_text, starts, first.end_line + 1, static_cast<int>(starts.size() - 1));
  return out;
}

// ---- raw metrics ------------------------------------------------------------

namespace {

// Length of a Python str.splitlines() terminator at `i`, 0 if none.
std::size_t line_break_length(std::string_view s, std::size_t i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  if (c == '\r') return i + 1 < s.size() && s[i + 1] == '\n' ? 2 : 1;
  if (c == '\n' || c == '\v' || c == '\f' || c == 0x1c || c == 0x1d || c == 0x1e) return 1;
  if (c == 0xc2 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x85) return 2;
  if (c == 0xe2 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80) {
    unsigned char d = static_cast<unsigned char>(s[i + 2]);
    if (d == 0xa8 || d == 0xa9) return 3;
  }
  return 0;
}

// Length of a whitespace code point (Python str.isspace) at `i`, 0 if none.
std::size_t space_length(std::string_view s, std::size_t i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  if (c == ' ' || (c >= 0x09 && c <= 0x0d) || (c >= 0x1c && c <= 0x1f)) return 1;
  auto byte = [&](std::size_t k) {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0;
  };
  if (c == 0xc2 && (byte(1) == 0x85 || byte(1) == 0xa0)) return 2;
  if (c == 0xe1 && byte(1) == 0x9a && byte(2) == 0x80) return 3;
  if (c == 0xe2 && byte(1) == 0x80 &&
      ((byte(2) >= 0x80 && byte(2) <= 0x8a) || byte(2) == 0xa8 || byte(2) == 0xa9 || byte(2) == 0xaf))
    return 3;
  if (c == 0xe2 && byte(1) == 0x81 && byte(2) == 0x9f) return 3;
  if (c == 0xe3 && byte(1) == 0x80 && byte(2) == 0x80) return 3;
  return 0;
}

std::string_view strip(std::string_view s) {
  std::size_t a = 0;
  while (a < s.size()) {
    std::size_t n = space_length(s, a);
    if (n == 0) break;
    a += n;
  }
  std::size_t b = s.size();
  while (b > a) {
    // Scan back to the start of the last code point.
    std::size_t k = b - 1;
    while (k > a && (static_cast<unsigned char>(s[k]) & 0xc0) == 0x80) --k;
    std::size_t n = space_length(s, k);
    if (n == 0 || k + n != b) break;
    b = k;
  }
  return s.substr(a, b - a);
}

std::vector<std::string_view> stripped_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t begin = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t n = line_break_length(s, i);
    if (n == 0) {
      ++i;
      continue;
    }
    lines.push_back(strip(s.substr(begin, i - begin)));
    i += n;
    begin = i;
  }
  if (begin < s.size()) lines.push_back(strip(s.substr(begin)));
  return lines;
}

bool is_filler(py::TokenKind k) {
  return k == py::TokenKind::NL || k == py::TokenKind::Newline || k == py::TokenKind::EndMarker ||
         k == py::TokenKind::Indent || k == py::TokenKind::Dedent;
}

bool is_single_token(const std::vector<py::Token>& tokens, py::TokenKind kind) {
  if (tokens.empty() || tokens.front().kind != kind) return false;
  return std::all_of(tokens.begin() + 1, tokens.end(),
                     [](const py::Token& t) { return is_filler(t.kind); });
}

}  // namespace

LineCategoryCounts count_line_categories(std::string_view source) {
  LineCategoryCounts counts;
  auto lines = stripped_lines(source);
  py::LexOptions options;
  options.track_indentation = false;
  options.fstrings_as_strings = true;

  auto count_as_code = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to; ++k) (lines[k].empty() ? counts.blank_lines : counts.loc) += 1;
  };

  std::size_t i = 0;
  while (i < lines.size()) {
    std::string buffer(lines[i]);
    std::size_t j = i;
    py::LexResult lexed;
    while (true) {
      lexed = py::tokenize(buffer, options);
      if (lexed.status == py::LexStatus::Ok) break;
      if (lexed.status == py::LexStatus::Invalid || j + 1 >= lines.size()) {
        // Tokenization cannot recover: the remaining lines count as code.
        count_as_code(i, lines.size());
        return counts;
      }
      ++j;
      buffer += '\n';
      buffer += lines[j];
    }

    const auto& tokens = lexed.tokens;
    if (is_single_token(tokens, py::TokenKind::Comment)) {
      counts.comment_lines += 1;
    } else if (is_single_token(tokens, py::TokenKind::String)) {
      if (tokens.front().line == tokens.front().end_line) {
        counts.comment_lines += 1;
      } else {
        for (std::size_t k = i; k <= j; ++k)
          (lines[k].empty() ? counts.blank_lines : counts.multiline_string_lines) += 1;
      }
    } else {
      count_as_code(i, j + 1);
    }
    i = j + 1;
  }
  return counts;
}

}  // namespace redline::source
