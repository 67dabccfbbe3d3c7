#include <algorithm>
#include <array>
#include <string>

#include "sketchkit/errors.hpp"
#include "sketchkit/python/ast.hpp"
#include "sketchkit/python/lexer.hpp"

namespace sketchkit::python {

std::string_view kind_name(Kind kind) {
  static constexpr std::string_view kNames[] = {
#define SKETCHKIT_X(name) #name,
      SKETCHKIT_PY_NODE_KINDS(SKETCHKIT_X)
#undef SKETCHKIT_X
  };
  return kNames[static_cast<std::size_t>(kind)];
}

bool is_function_def(const Node& node) {
  return node.kind == Kind::FunctionDef || node.kind == Kind::AsyncFunctionDef;
}

bool is_statement(Kind kind) {
  switch (kind) {
    case Kind::FunctionDef: case Kind::AsyncFunctionDef: case Kind::ClassDef:
    case Kind::Return: case Kind::Delete: case Kind::Assign: case Kind::AugAssign:
    case Kind::AnnAssign: case Kind::For: case Kind::AsyncFor: case Kind::While:
    case Kind::If: case Kind::With: case Kind::AsyncWith: case Kind::Match: case Kind::Raise:
    case Kind::Try: case Kind::TryStar: case Kind::Assert: case Kind::Import:
    case Kind::ImportFrom: case Kind::Global: case Kind::Nonlocal: case Kind::Expr:
    case Kind::Pass: case Kind::Break: case Kind::Continue:
      return true;
    default:
      return false;
  }
}

std::span<const Node* const> body_of(const Node& node) {
  if (is_function_def(node) || node.kind == Kind::ClassDef) {
    return node.child_range(node.split[1], node.children.size());
  }
  if (node.kind == Kind::Module) return node.child_range(0, node.children.size());
  return {};
}

namespace {

bool starts_expression(const Token& t) {
  switch (t.kind) {
    case TokenKind::Number:
    case TokenKind::String:
      return true;
    case TokenKind::Name:
      if (!is_keyword(t.text)) return true;
      return t.text == "None" || t.text == "True" || t.text == "False" || t.text == "not" ||
             t.text == "lambda" || t.text == "await" || t.text == "yield";
    case TokenKind::Op:
      return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
             t.text == "~" || t.text == "*" || t.text == "..." || t.text == "**";
    default:
      return false;
  }
}

struct BinaryLevel {
  std::array<std::pair<std::string_view, Kind>, 5> ops;
  std::size_t count;
};

// Binary operator levels from loosest to tightest binding.
constexpr BinaryLevel kBinaryLevels[] = {
    {{{{"|", Kind::BitOr}}}, 1},
    {{{{"^", Kind::BitXor}}}, 1},
    {{{{"&", Kind::BitAnd}}}, 1},
    {{{{"<<", Kind::LShift}, {">>", Kind::RShift}}}, 2},
    {{{{"+", Kind::Add}, {"-", Kind::Sub}}}, 2},
    {{{{"*", Kind::Mult}, {"/", Kind::Div}, {"//", Kind::FloorDiv}, {"%", Kind::Mod},
       {"@", Kind::MatMult}}},
     5},
};

constexpr std::array<std::pair<std::string_view, Kind>, 13> kAugOps = {{
    {"+=", Kind::Add}, {"-=", Kind::Sub}, {"*=", Kind::Mult}, {"/=", Kind::Div},
    {"//=", Kind::FloorDiv}, {"%=", Kind::Mod}, {"@=", Kind::MatMult}, {"&=", Kind::BitAnd},
    {"|=", Kind::BitOr}, {"^=", Kind::BitXor}, {"<<=", Kind::LShift}, {">>=", Kind::RShift},
    {"**=", Kind::Pow},
}};

class Parser {
 public:
  Parser(std::string_view source, std::vector<Token> tokens, std::deque<Node>& arena)
      : src_(source), arena_(arena) {
    toks_.reserve(tokens.size());
    for (const Token& t : tokens) {
      if (t.kind != TokenKind::Comment && t.kind != TokenKind::NL) toks_.push_back(t);
    }
  }

  const Node* parse_module() {
    Node* module = make(Kind::Module, 0, 1);
    while (cur().kind != TokenKind::EndMarker) {
      if (cur().kind == TokenKind::Indent) error(cur(), "unexpected indent");
      if (cur().kind == TokenKind::Newline) {
        advance();
        continue;
      }
      parse_statement(module->children);
    }
    module->end = static_cast<std::uint32_t>(src_.size());
    return module;
  }

 private:
  // ---- token helpers -----------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }

  const Token& advance() {
    const Token& t = toks_[pos_];
    if (t.kind != TokenKind::Newline && t.kind != TokenKind::Indent &&
        t.kind != TokenKind::Dedent && t.kind != TokenKind::EndMarker) {
      prev_end_ = t.end;
    }
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  bool at_op(std::string_view op) const { return cur().is_op(op); }
  bool at_kw(std::string_view kw) const { return cur().is_name(kw); }

  bool accept_op(std::string_view op) {
    if (!at_op(op)) return false;
    advance();
    return true;
  }
  bool accept_kw(std::string_view kw) {
    if (!at_kw(kw)) return false;
    advance();
    return true;
  }

  const Token& expect_op(std::string_view op) {
    if (!at_op(op)) error(cur(), "expected '" + std::string(op) + "'");
    return advance();
  }
  const Token& expect_kw(std::string_view kw) {
    if (!at_kw(kw)) error(cur(), "expected '" + std::string(kw) + "'");
    return advance();
  }

  const Token& expect_name() {
    if (cur().kind != TokenKind::Name || is_keyword(cur().text)) error(cur(), "invalid syntax");
    return advance();
  }

  std::uint32_t colon_end() { return expect_op(":").end; }

  [[noreturn]] void error(const Token& t, const std::string& message) const {
    std::string msg = message;
    if (t.kind == TokenKind::Indent) msg = "unexpected indent";
    if (t.kind == TokenKind::EndMarker && message == "invalid syntax") {
      msg = "unexpected EOF while parsing";
    }
    throw SyntaxError(msg, t.line, t.col + 1);
  }

  [[noreturn]] void error_at(const Node& n, const std::string& message) const {
    std::size_t line_start = src_.rfind('\n', n.begin == 0 ? 0 : n.begin - 1);
    line_start = line_start == std::string_view::npos ? 0 : line_start + 1;
    if (n.begin == 0) line_start = 0;
    throw SyntaxError(message, n.line, n.begin - line_start + 1);
  }

  // ---- node helpers ------------------------------------------------------

  Node* make(Kind kind, std::uint32_t begin, std::uint32_t line) {
    Node& n = arena_.emplace_back();
    n.kind = kind;
    n.begin = begin;
    n.end = begin;
    n.line = line;
    return &n;
  }
  Node* make(Kind kind, const Token& first) { return make(kind, first.begin, first.line); }
  Node* make(Kind kind, const Node& first) { return make(kind, first.begin, first.line); }

  Node* done(Node* n) {
    n->end = std::max(n->begin, prev_end_);
    return n;
  }

  Node* leaf(Kind kind, const Token& t) {
    Node* n = make(kind, t);
    n->end = t.end;
    return n;
  }

  // ---- statements --------------------------------------------------------

  void parse_statement(std::vector<const Node*>& out) {
    const Token& t = cur();
    if (t.kind == TokenKind::Name) {
      if (t.text == "def" || t.text == "class" || t.text == "async" || t.text == "if" ||
          t.text == "while" || t.text == "for" || t.text == "try" || t.text == "with") {
        out.push_back(parse_compound({}));
        return;
      }
      if (t.text == "match") {
        if (const Node* m = try_parse_match()) {
          out.push_back(m);
          return;
        }
      }
    }
    if (t.is_op("@")) {
      std::vector<const Node*> decorators;
      while (at_op("@")) {
        const Token& at = advance();
        Node* expr = parse_named_expression();
        (void)at;
        decorators.push_back(expr);
        if (cur().kind != TokenKind::Newline) error(cur(), "invalid syntax");
        advance();
      }
      if (!at_kw("def") && !at_kw("class") && !(at_kw("async") && peek().is_name("def"))) {
        error(cur(), "invalid syntax");
      }
      out.push_back(parse_compound(std::move(decorators)));
      return;
    }
    if (t.kind == TokenKind::Indent) error(t, "unexpected indent");
    parse_simple_statements(out);
  }

  Node* parse_compound(std::vector<const Node*> decorators) {
    const Token& t = cur();
    if (t.text == "def") return parse_funcdef(std::move(decorators), nullptr);
    if (t.text == "class") return parse_classdef(std::move(decorators));
    if (t.text == "async") {
      const Token& async_tok = advance();
      if (at_kw("def")) return parse_funcdef(std::move(decorators), &async_tok);
      if (at_kw("for")) return parse_for(&async_tok);
      if (at_kw("with")) return parse_with(&async_tok);
      error(cur(), "invalid syntax");
    }
    if (t.text == "if") return parse_if();
    if (t.text == "while") return parse_while();
    if (t.text == "for") return parse_for(nullptr);
    if (t.text == "try") return parse_try();
    if (t.text == "with") return parse_with(nullptr);
    error(t, "invalid syntax");
  }

  // Appends the suite's statements to `out`.
  void parse_block(std::vector<const Node*>& out) {
    if (cur().kind == TokenKind::Newline) {
      advance();
      if (cur().kind != TokenKind::Indent) error(cur(), "expected an indented block");
      advance();
      while (cur().kind != TokenKind::Dedent && cur().kind != TokenKind::EndMarker) {
        parse_statement(out);
      }
      if (cur().kind == TokenKind::Dedent) advance();
      return;
    }
    parse_simple_statements(out);
  }

  Node* parse_funcdef(std::vector<const Node*> decorators, const Token* async_tok) {
    const Token& first = async_tok ? *async_tok : cur();
    std::uint32_t begin = decorators.empty() ? first.begin : decorator_begin(decorators);
    std::uint32_t line = decorators.empty() ? first.line : decorators.front()->line;
    Node* fn = make(async_tok ? Kind::AsyncFunctionDef : Kind::FunctionDef, begin, line);
    fn->split[2] = async_tok ? async_tok->begin : cur().begin;
    expect_kw("def");
    fn->name = std::string(expect_name().text);
    fn->children = std::move(decorators);
    fn->split[0] = static_cast<std::uint32_t>(fn->children.size());
    if (at_op("[")) error(cur(), "type parameter lists are not supported");
    const Token& open = expect_op("(");
    fn->children.push_back(parse_parameters(open, ")"));
    expect_op(")");
    if (accept_op("->")) fn->children.push_back(parse_expression());
    fn->colon = colon_end();
    fn->split[1] = static_cast<std::uint32_t>(fn->children.size());
    parse_block(fn->children);
    return done(fn);
  }

  std::uint32_t decorator_begin(const std::vector<const Node*>& decorators) const {
    // The '@' token precedes the first decorator expression.
    std::size_t at = src_.rfind('@', decorators.front()->begin);
    return static_cast<std::uint32_t>(at == std::string_view::npos ? decorators.front()->begin : at);
  }

  Node* parse_classdef(std::vector<const Node*> decorators) {
    std::uint32_t begin = decorators.empty() ? cur().begin : decorator_begin(decorators);
    std::uint32_t line = decorators.empty() ? cur().line : decorators.front()->line;
    Node* cls = make(Kind::ClassDef, begin, line);
    cls->split[2] = cur().begin;
    expect_kw("class");
    cls->name = std::string(expect_name().text);
    cls->children = std::move(decorators);
    cls->split[0] = static_cast<std::uint32_t>(cls->children.size());
    if (at_op("[")) error(cur(), "type parameter lists are not supported");
    if (accept_op("(")) {
      parse_call_arguments(cls->children);
      expect_op(")");
    }
    cls->colon = colon_end();
    cls->split[1] = static_cast<std::uint32_t>(cls->children.size());
    parse_block(cls->children);
    return done(cls);
  }

  // Parameters of `def` (annotations allowed) or `lambda` (close == ":").
  Node* parse_parameters(const Token& open, std::string_view close) {
    bool lambda = close == ":";
    Node* args = make(Kind::arguments, lambda ? cur() : open);
    bool seen_star = false;
    bool seen_kwargs = false;
    bool seen_default = false;
    while (!at_op(close)) {
      if (seen_kwargs) error(cur(), "arguments cannot follow var-keyword argument");
      if (accept_op("/")) {
        if (seen_star) error(cur(), "/ must be ahead of *");
      } else if (at_op("*")) {
        const Token& star = advance();
        seen_star = true;
        if (at_op(",") || at_op(close)) {
          if (at_op(close)) error(star, "named arguments must follow bare *");
        } else {
          args->children.push_back(parse_param(lambda, ParamKind::VarArgs, star));
        }
      } else if (at_op("**")) {
        const Token& stars = advance();
        args->children.push_back(parse_param(lambda, ParamKind::KwArgs, stars));
        seen_kwargs = true;
      } else {
        Node* p = parse_param(lambda, ParamKind::Positional, cur());
        bool has_default = p->children.size() > p->split[0];
        if (!has_default && seen_default && !seen_star) {
          error_at(*p, "non-default argument follows default argument");
        }
        seen_default = seen_default || has_default;
        args->children.push_back(p);
      }
      if (!accept_op(",")) break;
    }
    return done(args);
  }

  Node* parse_param(bool lambda, ParamKind kind, const Token& first) {
    const Token& name = expect_name();
    Node* p = make(Kind::arg, first);
    p->name = std::string(name.text);
    p->flag = static_cast<std::uint8_t>(kind);
    if (!lambda && accept_op(":")) {
      p->children.push_back(kind == ParamKind::VarArgs && at_op("*") ? parse_star_expression()
                                                                     : parse_expression());
      p->split[0] = 1;
    }
    if (kind == ParamKind::Positional && accept_op("=")) {
      p->children.push_back(parse_expression());
    }
    return done(p);
  }

  Node* parse_if() {
    const Token& kw = advance();  // 'if' or 'elif'
    Node* node = make(Kind::If, kw);
    node->children.push_back(parse_named_expression());
    node->colon = colon_end();
    parse_block(node->children);
    node->split[1] = static_cast<std::uint32_t>(node->children.size());
    if (at_kw("elif")) {
      node->children.push_back(parse_if());
    } else if (accept_kw("else")) {
      colon_end();
      parse_block(node->children);
    }
    return done(node);
  }

  Node* parse_while() {
    Node* node = make(Kind::While, advance());
    node->children.push_back(parse_named_expression());
    node->colon = colon_end();
    parse_block(node->children);
    node->split[1] = static_cast<std::uint32_t>(node->children.size());
    if (accept_kw("else")) {
      colon_end();
      parse_block(node->children);
    }
    return done(node);
  }

  Node* parse_for(const Token* async_tok) {
    Node* node = make(async_tok ? Kind::AsyncFor : Kind::For, async_tok ? *async_tok : cur());
    expect_kw("for");
    Node* target = parse_target_list();
    check_target(*target, false);
    node->children.push_back(target);
    expect_kw("in");
    node->children.push_back(parse_star_expressions());
    node->colon = colon_end();
    parse_block(node->children);
    node->split[1] = static_cast<std::uint32_t>(node->children.size());
    if (accept_kw("else")) {
      colon_end();
      parse_block(node->children);
    }
    return done(node);
  }

  Node* parse_try() {
    Node* node = make(Kind::Try, advance());
    node->colon = colon_end();
    parse_block(node->children);
    node->split[0] = static_cast<std::uint32_t>(node->children.size());
    bool any_handler = false;
    bool bare_seen = false;
    while (at_kw("except")) {
      const Token& kw = advance();
      Node* handler = make(Kind::ExceptHandler, kw);
      if (accept_op("*")) node->kind = Kind::TryStar;
      if (bare_seen) error(kw, "default 'except:' must be last");
      if (!at_op(":")) {
        Node* type = parse_expression();
        if (at_op(",")) {
          Node* tuple = make(Kind::Tuple, *type);
          tuple->children.push_back(type);
          while (accept_op(",")) {
            if (at_op(":") || at_kw("as")) break;
            tuple->children.push_back(parse_expression());
          }
          type = done(tuple);
        }
        handler->children.push_back(type);
        if (accept_kw("as")) handler->name = std::string(expect_name().text);
      } else {
        bare_seen = true;
      }
      handler->split[0] = static_cast<std::uint32_t>(handler->children.size());
      handler->colon = colon_end();
      parse_block(handler->children);
      node->children.push_back(done(handler));
      any_handler = true;
    }
    node->split[1] = static_cast<std::uint32_t>(node->children.size());
    if (any_handler && accept_kw("else")) {
      colon_end();
      parse_block(node->children);
    }
    node->split[2] = static_cast<std::uint32_t>(node->children.size());
    bool has_finally = false;
    if (accept_kw("finally")) {
      colon_end();
      parse_block(node->children);
      has_finally = true;
    }
    if (!any_handler && !has_finally) error(cur(), "expected 'except' or 'finally' block");
    return done(node);
  }

  Node* parse_with(const Token* async_tok) {
    Node* node = make(async_tok ? Kind::AsyncWith : Kind::With, async_tok ? *async_tok : cur());
    expect_kw("with");
    bool parsed = false;
    if (at_op("(")) {
      // Parenthesized item list; falls back to an ordinary expression.
      std::size_t save = pos_;
      std::uint32_t save_end = prev_end_;
      std::size_t save_children = node->children.size();
      try {
        advance();
        while (!at_op(")")) {
          node->children.push_back(parse_with_item());
          if (!accept_op(",")) break;
        }
        expect_op(")");
        if (!at_op(":")) throw SyntaxError("not a parenthesized with", 0, 0);
        parsed = true;
      } catch (const SyntaxError&) {
        pos_ = save;
        prev_end_ = save_end;
        node->children.resize(save_children);
      }
    }
    if (!parsed) {
      do {
        node->children.push_back(parse_with_item());
      } while (accept_op(","));
    }
    node->split[0] = static_cast<std::uint32_t>(node->children.size());
    node->colon = colon_end();
    parse_block(node->children);
    return done(node);
  }

  Node* parse_with_item() {
    Node* item = make(Kind::withitem, cur());
    item->children.push_back(parse_expression());
    if (accept_kw("as")) {
      Node* target = parse_target();
      check_target(*target, false);
      item->children.push_back(target);
    }
    return done(item);
  }

  // ---- match statement -----------------------------------------------------

  const Node* try_parse_match() {
    std::size_t save = pos_;
    std::uint32_t save_end = prev_end_;
    Node* node = nullptr;
    try {
      node = make(Kind::Match, advance());
      if (!starts_expression(cur()) || at_op("**")) throw SyntaxError("", 0, 0);
      Node* subject = parse_star_named_expression();
      if (at_op(",")) {
        Node* tuple = make(Kind::Tuple, *subject);
        tuple->children.push_back(subject);
        while (accept_op(",")) {
          if (at_op(":")) break;
          tuple->children.push_back(parse_star_named_expression());
        }
        subject = done(tuple);
      }
      node->children.push_back(subject);
      node->colon = colon_end();
      if (cur().kind != TokenKind::Newline || peek().kind != TokenKind::Indent ||
          !peek(2).is_name("case")) {
        throw SyntaxError("", 0, 0);
      }
    } catch (const SyntaxError&) {
      pos_ = save;
      prev_end_ = save_end;
      return nullptr;
    }
    advance();  // NEWLINE
    advance();  // INDENT
    while (at_kw("case")) node->children.push_back(parse_case());
    if (cur().kind != TokenKind::Dedent) error(cur(), "expected 'case' block");
    advance();
    return done(node);
  }

  Node* parse_case() {
    Node* c = make(Kind::match_case, advance());
    c->children.push_back(parse_open_sequence_pattern());
    if (accept_kw("if")) c->children.push_back(parse_named_expression());
    c->split[0] = static_cast<std::uint32_t>(c->children.size());
    c->colon = colon_end();
    parse_block(c->children);
    return done(c);
  }

  Node* parse_open_sequence_pattern() {
    Node* first = parse_maybe_star_pattern();
    if (!at_op(",")) return first;
    Node* seq = make(Kind::MatchSequence, *first);
    seq->children.push_back(first);
    while (accept_op(",")) {
      if (at_op(":") || at_kw("if")) break;
      seq->children.push_back(parse_maybe_star_pattern());
    }
    return done(seq);
  }

  Node* parse_maybe_star_pattern() {
    if (at_op("*")) {
      Node* star = make(Kind::MatchStar, advance());
      const Token& name = expect_name();
      if (name.text != "_") star->name = std::string(name.text);
      return done(star);
    }
    return parse_pattern();
  }

  Node* parse_pattern() {
    Node* p = parse_or_pattern();
    if (accept_kw("as")) {
      const Token& name = expect_name();
      if (name.text == "_") error(name, "cannot use '_' as a target");
      Node* as = make(Kind::MatchAs, *p);
      as->children.push_back(p);
      as->name = std::string(name.text);
      return done(as);
    }
    return p;
  }

  Node* parse_or_pattern() {
    Node* first = parse_closed_pattern();
    if (!at_op("|")) return first;
    Node* alt = make(Kind::MatchOr, *first);
    alt->children.push_back(first);
    while (accept_op("|")) alt->children.push_back(parse_closed_pattern());
    return done(alt);
  }

  Node* parse_closed_pattern() {
    const Token& t = cur();
    if (t.kind == TokenKind::Number || t.kind == TokenKind::String || t.is_op("-")) {
      Node* value = make(Kind::MatchValue, t);
      value->children.push_back(parse_sum_level());
      return done(value);
    }
    if (t.is_name("None") || t.is_name("True") || t.is_name("False")) {
      Node* s = make(Kind::MatchSingleton, t);
      advance();
      return done(s);
    }
    if (t.kind == TokenKind::Name) {
      const Token& first = expect_name();
      Node* ref = leaf(Kind::Name, first);
      ref->name = std::string(first.text);
      bool dotted = false;
      while (at_op(".")) {
        advance();
        const Token& attr = expect_name();
        Node* a = make(Kind::Attribute, *ref);
        a->children.push_back(ref);
        a->name = std::string(attr.text);
        ref = done(a);
        dotted = true;
      }
      if (at_op("(")) return parse_class_pattern(ref);
      if (dotted) {
        Node* value = make(Kind::MatchValue, *ref);
        value->children.push_back(ref);
        return done(value);
      }
      Node* capture = make(Kind::MatchAs, first);
      if (first.text != "_") capture->name = std::string(first.text);
      return done(capture);
    }
    if (t.is_op("(")) {
      advance();
      if (accept_op(")")) return done(make(Kind::MatchSequence, t));
      Node* first = parse_maybe_star_pattern();
      if (at_op(",")) {
        Node* seq = make(Kind::MatchSequence, t);
        seq->children.push_back(first);
        while (accept_op(",")) {
          if (at_op(")")) break;
          seq->children.push_back(parse_maybe_star_pattern());
        }
        expect_op(")");
        return done(seq);
      }
      expect_op(")");
      if (first->kind == Kind::MatchStar) error(t, "invalid syntax");
      return first;
    }
    if (t.is_op("[")) {
      Node* seq = make(Kind::MatchSequence, advance());
      while (!at_op("]")) {
        seq->children.push_back(parse_maybe_star_pattern());
        if (!accept_op(",")) break;
      }
      expect_op("]");
      return done(seq);
    }
    if (t.is_op("{")) {
      Node* mapping = make(Kind::MatchMapping, advance());
      while (!at_op("}")) {
        if (accept_op("**")) {
          mapping->asname = std::string(expect_name().text);
        } else {
          Node* key;
          if (cur().kind == TokenKind::Name && !cur().is_name("None") &&
              !cur().is_name("True") && !cur().is_name("False")) {
            key = parse_primary();
          } else {
            key = parse_sum_level();
          }
          mapping->children.push_back(key);
          expect_op(":");
          mapping->children.push_back(parse_pattern());
        }
        if (!accept_op(",")) break;
      }
      expect_op("}");
      return done(mapping);
    }
    error(t, "invalid syntax");
  }

  Node* parse_class_pattern(Node* cls) {
    Node* node = make(Kind::MatchClass, *cls);
    node->children.push_back(cls);
    expect_op("(");
    while (!at_op(")")) {
      if (cur().kind == TokenKind::Name && peek().is_op("=")) {
        const Token& name = advance();
        advance();
        Node* kw = make(Kind::keyword, name);
        kw->name = std::string(name.text);
        kw->children.push_back(parse_pattern());
        node->children.push_back(done(kw));
      } else {
        node->children.push_back(parse_pattern());
      }
      if (!accept_op(",")) break;
    }
    expect_op(")");
    return done(node);
  }

  // ---- simple statements -----------------------------------------------------

  void parse_simple_statements(std::vector<const Node*>& out) {
    while (true) {
      out.push_back(parse_small_statement());
      if (!accept_op(";")) break;
      if (cur().kind == TokenKind::Newline) break;
    }
    if (cur().kind != TokenKind::Newline) error(cur(), "invalid syntax");
    advance();
  }

  Node* parse_small_statement() {
    const Token& t = cur();
    if (t.kind == TokenKind::Name) {
      if (t.text == "pass") return leaf(Kind::Pass, advance());
      if (t.text == "break") return leaf(Kind::Break, advance());
      if (t.text == "continue") return leaf(Kind::Continue, advance());
      if (t.text == "return") {
        Node* node = make(Kind::Return, advance());
        if (starts_expression(cur())) node->children.push_back(parse_star_expressions());
        return done(node);
      }
      if (t.text == "raise") {
        Node* node = make(Kind::Raise, advance());
        if (starts_expression(cur())) {
          node->children.push_back(parse_expression());
          if (accept_kw("from")) node->children.push_back(parse_expression());
        }
        return done(node);
      }
      if (t.text == "global" || t.text == "nonlocal") {
        Node* node = make(t.text == "global" ? Kind::Global : Kind::Nonlocal, advance());
        do {
          if (!node->name.empty()) node->name += ',';
          node->name += expect_name().text;
        } while (accept_op(","));
        return done(node);
      }
      if (t.text == "del") {
        Node* node = make(Kind::Delete, advance());
        do {
          if (!starts_expression(cur())) break;
          Node* target = parse_bitwise_or();
          check_target(*target, true);
          node->children.push_back(target);
        } while (accept_op(","));
        if (node->children.empty()) error(cur(), "invalid syntax");
        return done(node);
      }
      if (t.text == "assert") {
        Node* node = make(Kind::Assert, advance());
        node->children.push_back(parse_expression());
        if (accept_op(",")) node->children.push_back(parse_expression());
        return done(node);
      }
      if (t.text == "import") return parse_import();
      if (t.text == "from") return parse_from_import();
    }
    return parse_expression_statement();
  }

  Node* parse_import() {
    Node* node = make(Kind::Import, advance());
    do {
      Node* alias = make(Kind::alias, cur());
      alias->name = parse_dotted_name();
      if (accept_kw("as")) alias->asname = std::string(expect_name().text);
      node->children.push_back(done(alias));
    } while (accept_op(","));
    return done(node);
  }

  std::string parse_dotted_name() {
    std::string name(expect_name().text);
    while (at_op(".")) {
      advance();
      name += '.';
      name += expect_name().text;
    }
    return name;
  }

  Node* parse_from_import() {
    Node* node = make(Kind::ImportFrom, advance());
    int level = 0;
    while (at_op(".") || at_op("...")) level += static_cast<int>(advance().text.size());
    node->flag = static_cast<std::uint8_t>(std::min(level, 255));
    if (!at_kw("import")) node->name = parse_dotted_name();
    if (level == 0 && node->name.empty()) error(cur(), "invalid syntax");
    expect_kw("import");
    if (at_op("*")) {
      Node* alias = leaf(Kind::alias, advance());
      alias->name = "*";
      node->children.push_back(alias);
      return done(node);
    }
    bool paren = accept_op("(");
    do {
      if (paren && at_op(")")) break;
      Node* alias = make(Kind::alias, cur());
      alias->name = std::string(expect_name().text);
      if (accept_kw("as")) alias->asname = std::string(expect_name().text);
      node->children.push_back(done(alias));
    } while (accept_op(","));
    if (paren) expect_op(")");
    if (node->children.empty()) error(cur(), "invalid syntax");
    return done(node);
  }

  Node* parse_expression_statement() {
    const Token& first_tok = cur();
    if (!starts_expression(first_tok)) error(first_tok, "invalid syntax");
    Node* first = at_kw("yield") ? parse_yield() : parse_star_expressions();
    if (at_op(":")) {
      if (first->kind != Kind::Name && first->kind != Kind::Attribute &&
          first->kind != Kind::Subscript) {
        error_at(*first, "illegal target for annotation");
      }
      Node* node = make(Kind::AnnAssign, *first);
      advance();
      node->children.push_back(first);
      node->children.push_back(parse_expression());
      if (accept_op("=")) {
        node->children.push_back(at_kw("yield") ? parse_yield() : parse_star_expressions());
      }
      return done(node);
    }
    for (const auto& [op, kind] : kAugOps) {
      if (at_op(op)) {
        if (first->kind != Kind::Name && first->kind != Kind::Attribute &&
            first->kind != Kind::Subscript) {
          error_at(*first, "illegal expression for augmented assignment");
        }
        Node* node = make(Kind::AugAssign, *first);
        const Token& op_tok = advance();
        node->children.push_back(first);
        node->children.push_back(leaf(kind, op_tok));
        node->children.push_back(at_kw("yield") ? parse_yield() : parse_star_expressions());
        return done(node);
      }
    }
    if (at_op("=")) {
      Node* node = make(Kind::Assign, *first);
      node->children.push_back(first);
      while (accept_op("=")) {
        node->children.push_back(at_kw("yield") ? parse_yield() : parse_star_expressions());
      }
      for (std::size_t i = 0; i + 1 < node->children.size(); ++i) {
        check_target(*node->children[i], false);
      }
      return done(node);
    }
    Node* expr = make(Kind::Expr, *first);
    expr->children.push_back(first);
    return done(expr);
  }

  void check_target(const Node& n, bool del) const {
    switch (n.kind) {
      case Kind::Name:
      case Kind::Attribute:
      case Kind::Subscript:
        return;
      case Kind::Starred:
        if (del) break;
        check_target(*n.children[0], del);
        return;
      case Kind::Tuple:
      case Kind::List:
        for (const Node* c : n.children) check_target(*c, del);
        return;
      default:
        break;
    }
    error_at(n, std::string(del ? "cannot delete " : "cannot assign to ") +
                    describe(n.kind));
  }

  static std::string describe(Kind kind) {
    switch (kind) {
      case Kind::Constant:
      case Kind::JoinedStr:
        return "literal";
      case Kind::Call:
        return "function call";
      case Kind::BinOp:
      case Kind::UnaryOp:
      case Kind::BoolOp:
        return "expression";
      case Kind::Compare:
        return "comparison";
      case Kind::Lambda:
        return "lambda";
      case Kind::IfExp:
        return "conditional expression";
      case Kind::NamedExpr:
        return "named expression";
      case Kind::Await:
        return "await expression";
      case Kind::Yield:
      case Kind::YieldFrom:
        return "yield expression";
      case Kind::ListComp:
        return "list comprehension";
      case Kind::DictComp:
        return "dict comprehension";
      case Kind::SetComp:
        return "set comprehension";
      case Kind::GeneratorExp:
        return "generator expression";
      case Kind::Dict:
        return "dict literal";
      case Kind::Set:
        return "set display";
      default:
        return std::string(kind_name(kind));
    }
  }

  // ---- expressions -----------------------------------------------------------

  Node* parse_yield() {
    Node* node = make(Kind::Yield, advance());
    if (accept_kw("from")) {
      node->kind = Kind::YieldFrom;
      node->children.push_back(parse_expression());
    } else if (starts_expression(cur())) {
      node->children.push_back(parse_star_expressions());
    }
    return done(node);
  }

  Node* parse_star_expressions() {
    Node* first = parse_star_expression();
    if (!at_op(",")) return first;
    Node* tuple = make(Kind::Tuple, *first);
    tuple->children.push_back(first);
    while (accept_op(",")) {
      if (!starts_expression(cur()) || at_kw("yield")) break;
      tuple->children.push_back(parse_star_expression());
    }
    return done(tuple);
  }

  Node* parse_star_expression() {
    if (at_op("*")) {
      Node* star = make(Kind::Starred, advance());
      star->children.push_back(parse_bitwise_or());
      return done(star);
    }
    return parse_expression();
  }

  Node* parse_star_named_expression() {
    if (at_op("*")) {
      Node* star = make(Kind::Starred, advance());
      star->children.push_back(parse_bitwise_or());
      return done(star);
    }
    return parse_named_expression();
  }

  Node* parse_named_expression() {
    if (cur().kind == TokenKind::Name && peek().is_op(":=")) {
      const Token& name = expect_name();
      Node* target = leaf(Kind::Name, name);
      target->name = std::string(name.text);
      Node* node = make(Kind::NamedExpr, name);
      advance();
      node->children.push_back(target);
      node->children.push_back(parse_expression());
      return done(node);
    }
    Node* e = parse_expression();
    if (at_op(":=")) error(cur(), "cannot use assignment expressions with " + describe(e->kind));
    return e;
  }

  Node* parse_expression() {
    if (at_kw("lambda")) return parse_lambda();
    Node* body = parse_disjunction();
    if (!at_kw("if")) return body;
    Node* node = make(Kind::IfExp, *body);
    advance();
    node->children.push_back(body);
    node->children.push_back(parse_disjunction());
    if (!accept_kw("else")) error(cur(), "expected 'else' after 'if' expression");
    node->children.push_back(parse_expression());
    return done(node);
  }

  Node* parse_lambda() {
    const Token& kw = advance();
    Node* node = make(Kind::Lambda, kw);
    node->children.push_back(parse_parameters(kw, ":"));
    expect_op(":");
    node->children.push_back(parse_expression());
    return done(node);
  }

  Node* parse_disjunction() { return parse_bool_level("or", Kind::Or); }

  Node* parse_bool_level(std::string_view kw, Kind op) {
    Node* first = kw == "or" ? parse_bool_level("and", Kind::And) : parse_inversion();
    if (!at_kw(kw)) return first;
    Node* node = make(Kind::BoolOp, *first);
    node->children.push_back(leaf(op, cur()));
    node->children.push_back(first);
    while (accept_kw(kw)) {
      node->children.push_back(kw == "or" ? parse_bool_level("and", Kind::And)
                                          : parse_inversion());
    }
    return done(node);
  }

  Node* parse_inversion() {
    if (at_kw("not")) {
      const Token& t = advance();
      Node* node = make(Kind::UnaryOp, t);
      node->children.push_back(leaf(Kind::Not, t));
      node->children.push_back(parse_inversion());
      return done(node);
    }
    return parse_comparison();
  }

  bool comparison_op(Kind& kind, std::size_t& width) const {
    const Token& t = cur();
    width = 1;
    if (t.kind == TokenKind::Op) {
      static constexpr std::pair<std::string_view, Kind> kOps[] = {
          {"==", Kind::Eq}, {"!=", Kind::NotEq}, {"<", Kind::Lt},
          {"<=", Kind::LtE}, {">", Kind::Gt},    {">=", Kind::GtE}};
      for (const auto& [op, k] : kOps) {
        if (t.text == op) {
          kind = k;
          return true;
        }
      }
      return false;
    }
    if (t.is_name("in")) {
      kind = Kind::In;
      return true;
    }
    if (t.is_name("not") && peek().is_name("in")) {
      kind = Kind::NotIn;
      width = 2;
      return true;
    }
    if (t.is_name("is")) {
      kind = peek().is_name("not") ? Kind::IsNot : Kind::Is;
      width = kind == Kind::IsNot ? 2 : 1;
      return true;
    }
    return false;
  }

  Node* parse_comparison() {
    Node* first = parse_bitwise_or();
    Kind op;
    std::size_t width;
    if (!comparison_op(op, width)) return first;
    Node* node = make(Kind::Compare, *first);
    node->children.push_back(first);
    while (comparison_op(op, width)) {
      Node* op_node = make(op, cur());
      for (std::size_t i = 0; i < width; ++i) advance();
      node->children.push_back(done(op_node));
      node->children.push_back(parse_bitwise_or());
    }
    return done(node);
  }

  Node* parse_bitwise_or() { return parse_binary(0); }
  Node* parse_sum_level() { return parse_binary(4); }

  Node* parse_binary(std::size_t level) {
    if (level >= std::size(kBinaryLevels)) return parse_factor();
    Node* left = parse_binary(level + 1);
    const BinaryLevel& ops = kBinaryLevels[level];
    while (true) {
      const Token& t = cur();
      if (t.kind != TokenKind::Op) break;
      const Kind* matched = nullptr;
      for (std::size_t i = 0; i < ops.count; ++i) {
        if (t.text == ops.ops[i].first) matched = &ops.ops[i].second;
      }
      if (!matched) break;
      Node* node = make(Kind::BinOp, *left);
      node->children.push_back(left);
      node->children.push_back(leaf(*matched, advance()));
      node->children.push_back(parse_binary(level + 1));
      left = done(node);
    }
    return left;
  }

  Node* parse_factor() {
    const Token& t = cur();
    Kind op;
    if (t.is_op("+")) {
      op = Kind::UAdd;
    } else if (t.is_op("-")) {
      op = Kind::USub;
    } else if (t.is_op("~")) {
      op = Kind::Invert;
    } else {
      return parse_power();
    }
    Node* node = make(Kind::UnaryOp, t);
    node->children.push_back(leaf(op, advance()));
    node->children.push_back(parse_factor());
    return done(node);
  }

  Node* parse_power() {
    Node* base;
    if (at_kw("await")) {
      Node* aw = make(Kind::Await, advance());
      aw->children.push_back(parse_primary());
      base = done(aw);
    } else {
      base = parse_primary();
    }
    if (!at_op("**")) return base;
    Node* node = make(Kind::BinOp, *base);
    node->children.push_back(base);
    node->children.push_back(leaf(Kind::Pow, advance()));
    node->children.push_back(parse_factor());
    return done(node);
  }

  Node* parse_primary() {
    Node* node = parse_atom();
    while (true) {
      if (at_op(".")) {
        advance();
        const Token& attr = expect_name();
        Node* a = make(Kind::Attribute, *node);
        a->children.push_back(node);
        a->name = std::string(attr.text);
        node = done(a);
      } else if (at_op("(")) {
        advance();
        Node* call = make(Kind::Call, *node);
        call->children.push_back(node);
        parse_call_arguments(call->children);
        expect_op(")");
        node = done(call);
      } else if (at_op("[")) {
        advance();
        Node* sub = make(Kind::Subscript, *node);
        sub->children.push_back(node);
        sub->children.push_back(parse_slices());
        expect_op("]");
        node = done(sub);
      } else {
        return node;
      }
    }
  }

  void parse_call_arguments(std::vector<const Node*>& out) {
    std::size_t first_arg = out.size();
    bool seen_keyword = false;
    bool seen_kw_unpack = false;
    while (!at_op(")")) {
      bool positional = !at_op("*") && !at_op("**") &&
                        !(cur().kind == TokenKind::Name && peek().is_op("="));
      if (positional && seen_kw_unpack) {
        error(cur(), "positional argument follows keyword argument unpacking");
      }
      if (positional && seen_keyword) error(cur(), "positional argument follows keyword argument");
      if (at_op("*") && seen_kw_unpack) {
        error(cur(), "iterable argument unpacking follows keyword argument unpacking");
      }
      seen_keyword = seen_keyword || (!positional && !at_op("*"));
      seen_kw_unpack = seen_kw_unpack || at_op("**");
      if (at_op("*")) {
        Node* star = make(Kind::Starred, advance());
        star->children.push_back(parse_expression());
        out.push_back(done(star));
      } else if (at_op("**")) {
        Node* kw = make(Kind::keyword, advance());
        kw->children.push_back(parse_expression());
        out.push_back(done(kw));
      } else if (cur().kind == TokenKind::Name && peek().is_op("=")) {
        const Token& name = expect_name();
        advance();
        Node* kw = make(Kind::keyword, name);
        kw->name = std::string(name.text);
        kw->children.push_back(parse_expression());
        out.push_back(done(kw));
      } else {
        Node* value = parse_named_expression();
        if (at_kw("for") || (at_kw("async") && peek().is_name("for"))) {
          Node* gen = make(Kind::GeneratorExp, *value);
          gen->children.push_back(value);
          parse_comprehension_clauses(gen->children);
          value = done(gen);
          if (out.size() != first_arg || !at_op(")")) {
            error_at(*value, "Generator expression must be parenthesized");
          }
        }
        out.push_back(value);
      }
      if (!accept_op(",")) break;
    }
  }

  Node* parse_slices() {
    Node* first = parse_slice();
    if (!at_op(",")) return first;
    Node* tuple = make(Kind::Tuple, *first);
    tuple->children.push_back(first);
    while (accept_op(",")) {
      if (at_op("]")) break;
      tuple->children.push_back(parse_slice());
    }
    return done(tuple);
  }

  Node* parse_slice() {
    Node* lower = nullptr;
    const Token& start = cur();
    if (!at_op(":")) {
      lower = at_op("*") ? parse_star_named_expression() : parse_named_expression();
      if (!at_op(":")) return lower;
    }
    Node* slice = lower ? make(Kind::Slice, *lower) : make(Kind::Slice, start);
    std::uint32_t mask = 0;
    if (lower) {
      slice->children.push_back(lower);
      mask |= 1;
    }
    expect_op(":");
    if (!at_op(":") && !at_op("]") && !at_op(",")) {
      slice->children.push_back(parse_expression());
      mask |= 2;
    }
    if (accept_op(":")) {
      if (!at_op("]") && !at_op(",")) {
        slice->children.push_back(parse_expression());
        mask |= 4;
      }
    }
    slice->split[0] = mask;
    return done(slice);
  }

  void parse_comprehension_clauses(std::vector<const Node*>& out) {
    while (at_kw("for") || (at_kw("async") && peek().is_name("for"))) {
      Node* comp = make(Kind::comprehension, cur());
      if (accept_kw("async")) comp->flag = 1;
      expect_kw("for");
      Node* target = parse_target_list();
      check_target(*target, false);
      comp->children.push_back(target);
      expect_kw("in");
      comp->children.push_back(parse_disjunction());
      while (accept_kw("if")) comp->children.push_back(parse_disjunction());
      out.push_back(done(comp));
    }
  }

  // Targets of `for` and comprehensions; stops before `in`.
  Node* parse_target_list() {
    Node* first = parse_target();
    if (!at_op(",")) return first;
    Node* tuple = make(Kind::Tuple, *first);
    tuple->children.push_back(first);
    while (accept_op(",")) {
      if (!starts_expression(cur())) break;
      tuple->children.push_back(parse_target());
    }
    return done(tuple);
  }

  Node* parse_target() {
    if (at_op("*")) {
      Node* star = make(Kind::Starred, advance());
      star->children.push_back(parse_bitwise_or());
      return done(star);
    }
    return parse_bitwise_or();
  }

  Node* parse_atom() {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::Name: {
        if (t.text == "None" || t.text == "True" || t.text == "False") {
          Node* c = leaf(Kind::Constant, advance());
          c->flag = static_cast<std::uint8_t>(Literal::Singleton);
          return c;
        }
        if (is_keyword(t.text)) error(t, "invalid syntax");
        Node* n = leaf(Kind::Name, advance());
        n->name = std::string(t.text);
        return n;
      }
      case TokenKind::Number: {
        Node* c = leaf(Kind::Constant, advance());
        c->flag = static_cast<std::uint8_t>(Literal::Number);
        return c;
      }
      case TokenKind::String:
        return parse_strings();
      case TokenKind::Op:
        if (t.text == "...") {
          Node* c = leaf(Kind::Constant, advance());
          c->flag = static_cast<std::uint8_t>(Literal::Ellipsis);
          return c;
        }
        if (t.text == "(") return parse_paren();
        if (t.text == "[") return parse_list();
        if (t.text == "{") return parse_brace();
        break;
      default:
        break;
    }
    error(t, "invalid syntax");
  }

  Node* parse_strings() {
    const Token& first = cur();
    Node* node = make(Kind::Constant, first);
    bool formatted = false;
    bool bytes = false;
    bool text = false;
    while (cur().kind == TokenKind::String) {
      std::string_view s = cur().text;
      std::size_t q = s.find_first_of("'\"");
      std::string_view prefix = s.substr(0, q);
      bool is_bytes = prefix.find_first_of("bB") != std::string_view::npos;
      if (prefix.find_first_of("fF") != std::string_view::npos) check_fstring(cur(), q);
      formatted = formatted || prefix.find_first_of("fFtT") != std::string_view::npos;
      bytes = bytes || is_bytes;
      text = text || !is_bytes;
      advance();
    }
    if (bytes && text) error(first, "cannot mix bytes and nonbytes literals");
    if (formatted) node->kind = Kind::JoinedStr;
    node->flag = static_cast<std::uint8_t>(bytes ? Literal::Bytes : Literal::Str);
    return done(node);
  }

  // Validates the replacement fields of one f-string token.
  void check_fstring(const Token& t, std::size_t quote) {
    std::string_view s = t.text;
    std::size_t qlen = s.size() >= quote + 6 && s[quote + 1] == s[quote] && s[quote + 2] == s[quote]
                           ? 3
                           : 1;
    std::string_view body = s.substr(quote + qlen, s.size() - quote - 2 * qlen);
    std::size_t i = 0;
    scan_fstring_literal(t, body, i, 0);
  }

  // Walks literal text until the end of `body` (depth 0) or a closing '}'
  // of an enclosing format spec (depth 1).
  void scan_fstring_literal(const Token& t, std::string_view body, std::size_t& i, int depth) {
    std::string_view prefix = t.text.substr(0, t.text.find_first_of("'\""));
    bool raw = prefix.find_first_of("rR") != std::string_view::npos;
    while (i < body.size()) {
      char c = body[i];
      if (c == '\\') {
        bool named = !raw && i + 2 < body.size() && body[i + 1] == 'N' && body[i + 2] == '{';
        if (named) {
          std::size_t close = body.find('}', i);
          i = close == std::string_view::npos ? body.size() : close + 1;
        } else {
          i += (i + 1 < body.size() && (body[i + 1] == '{' || body[i + 1] == '}')) ? 1 : 2;
        }
      } else if (c == '{') {
        if (depth == 0 && i + 1 < body.size() && body[i + 1] == '{') {
          i += 2;
          continue;
        }
        if (depth > 1) fstring_error(t, "expressions nested too deeply");
        ++i;
        scan_fstring_field(t, body, i, depth);
      } else if (c == '}') {
        if (depth > 0) return;
        if (i + 1 < body.size() && body[i + 1] == '}') {
          i += 2;
          continue;
        }
        fstring_error(t, "single '}' is not allowed");
      } else {
        ++i;
      }
    }
    if (depth > 0) fstring_error(t, "expecting '}'");
  }

  void scan_fstring_field(const Token& t, std::string_view body, std::size_t& i, int depth) {
    std::size_t start = i;
    std::vector<char> stack;
    while (true) {
      if (i >= body.size()) fstring_error(t, "expecting '}'");
      char c = body[i];
      if (c == '\'' || c == '"') {
        std::size_t close = body.find(c, i + 1);
        if (close == std::string_view::npos) fstring_error(t, "expecting '}'");
        i = close + 1;
        continue;
      }
      if (c == '(' || c == '[' || c == '{') {
        stack.push_back(c);
      } else if (c == ')' || c == ']' || c == '}') {
        if (stack.empty()) {
          if (c == '}') break;
          fstring_error(t, std::string("unmatched '") + c + "'");
        }
        char open = stack.back();
        if ((open == '(' && c != ')') || (open == '[' && c != ']') || (open == '{' && c != '}')) {
          fstring_error(t, std::string("closing parenthesis '") + c +
                               "' does not match opening parenthesis '" + open + "'");
        }
        stack.pop_back();
      } else if (stack.empty() && (c == '!' || c == ':') &&
                 !(c == '!' && i + 1 < body.size() && body[i + 1] == '=')) {
        break;
      } else if (c == '#') {
        fstring_error(t, "expression part cannot include '#'");
      }
      ++i;
    }
    std::string_view expr = body.substr(start, i - start);
    while (!expr.empty() && std::string_view(" \t\r\n").find(expr.back()) != std::string_view::npos) {
      expr.remove_suffix(1);
    }
    if (expr.size() >= 1 && expr.back() == '=' &&
        !(expr.size() >= 2 && std::string_view("=!<>").find(expr[expr.size() - 2]) !=
                                  std::string_view::npos)) {
      expr.remove_suffix(1);
    }
    if (expr.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      fstring_error(t, "empty expression not allowed");
    }
    check_fstring_expression(t, expr);
    if (body[i] == '!') {
      ++i;
      if (i >= body.size() || std::string_view("sra").find(body[i]) == std::string_view::npos) {
        fstring_error(t, "invalid conversion character: expected 's', 'r', or 'a'");
      }
      ++i;
      if (i >= body.size() || (body[i] != ':' && body[i] != '}')) {
        fstring_error(t, "expecting '}'");
      }
    }
    if (body[i] == ':') {
      ++i;
      scan_fstring_literal(t, body, i, depth + 1);
      if (i >= body.size()) fstring_error(t, "expecting '}'");
    }
    ++i;  // the closing '}'
  }

  void check_fstring_expression(const Token& t, std::string_view expr) {
    std::string wrapped = "(" + std::string(expr) + "\n)";
    try {
      Parser sub(wrapped, tokenize(wrapped), arena_);
      sub.parse_wrapped_expression();
    } catch (const SyntaxError& e) {
      fstring_error(t, e.message());
    }
  }

  void parse_wrapped_expression() {
    expect_op("(");
    if (at_kw("yield")) {
      parse_yield();
    } else {
      parse_star_expressions();
    }
    expect_op(")");
    if (cur().kind != TokenKind::Newline && cur().kind != TokenKind::EndMarker) {
      error(cur(), "invalid syntax");
    }
  }

  [[noreturn]] void fstring_error(const Token& t, const std::string& message) const {
    throw SyntaxError("f-string: " + message, t.line, t.col + 1);
  }

  Node* parse_paren() {
    const Token& open = advance();
    if (at_op(")")) {
      advance();
      Node* empty = make(Kind::Tuple, open);
      return done(empty);
    }
    if (at_kw("yield")) {
      Node* y = parse_yield();
      expect_op(")");
      return y;
    }
    Node* first = parse_star_named_expression();
    if (at_kw("for") || (at_kw("async") && peek().is_name("for"))) {
      Node* gen = make(Kind::GeneratorExp, open);
      gen->children.push_back(first);
      parse_comprehension_clauses(gen->children);
      expect_op(")");
      return done(gen);
    }
    if (at_op(",")) {
      Node* tuple = make(Kind::Tuple, open);
      tuple->children.push_back(first);
      while (accept_op(",")) {
        if (at_op(")")) break;
        tuple->children.push_back(parse_star_named_expression());
      }
      expect_op(")");
      return done(tuple);
    }
    expect_op(")");
    return first;
  }

  Node* parse_list() {
    const Token& open = advance();
    Node* list = make(Kind::List, open);
    if (accept_op("]")) return done(list);
    Node* first = parse_star_named_expression();
    list->children.push_back(first);
    if (at_kw("for") || (at_kw("async") && peek().is_name("for"))) {
      list->kind = Kind::ListComp;
      parse_comprehension_clauses(list->children);
      expect_op("]");
      return done(list);
    }
    while (accept_op(",")) {
      if (at_op("]")) break;
      list->children.push_back(parse_star_named_expression());
    }
    expect_op("]");
    return done(list);
  }

  Node* parse_brace() {
    const Token& open = advance();
    Node* node = make(Kind::Dict, open);
    if (accept_op("}")) return done(node);
    bool is_dict;
    if (at_op("**")) {
      Node* unpack = make(Kind::DoubleStarred, advance());
      unpack->children.push_back(parse_bitwise_or());
      node->children.push_back(done(unpack));
      is_dict = true;
    } else {
      Node* first = parse_star_named_expression();
      node->children.push_back(first);
      if (first->kind == Kind::Starred && at_op(":")) error(cur(), "invalid syntax");
      is_dict = accept_op(":");
      if (is_dict) node->children.push_back(parse_expression());
      if (at_kw("for") || (at_kw("async") && peek().is_name("for"))) {
        node->kind = is_dict ? Kind::DictComp : Kind::SetComp;
        parse_comprehension_clauses(node->children);
        expect_op("}");
        return done(node);
      }
    }
    if (!is_dict) node->kind = Kind::Set;
    while (accept_op(",")) {
      if (at_op("}")) break;
      if (is_dict) {
        if (at_op("**")) {
          Node* unpack = make(Kind::DoubleStarred, advance());
          unpack->children.push_back(parse_bitwise_or());
          node->children.push_back(done(unpack));
        } else {
          node->children.push_back(parse_expression());
          expect_op(":");
          node->children.push_back(parse_expression());
        }
      } else {
        node->children.push_back(parse_star_named_expression());
      }
    }
    expect_op("}");
    return done(node);
  }

  std::string_view src_;
  std::deque<Node>& arena_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::uint32_t prev_end_ = 0;
};

}  // namespace

Tree parse(std::string source) {
  auto arena = std::make_unique<std::deque<Node>>();
  std::vector<Token> tokens;
  try {
    tokens = tokenize(source);
  } catch (const SyntaxError& eof) {
    // An unclosed bracket is only noticed at EOF; report an earlier
    // grammar error first, as CPython does.
    std::deque<Node> scratch;
    try {
      Parser(source, tokenize_lenient(source), scratch).parse_module();
    } catch (const SyntaxError& early) {
      if (early.line() < eof.line()) throw early;
    }
    throw;
  }
  Parser parser(source, std::move(tokens), *arena);
  const Node* root = parser.parse_module();
  return Tree(std::move(source), std::move(arena), root);
}

bool parses(std::string_view source) {
  try {
    parse(std::string(source));
    return true;
  } catch (const SyntaxError&) {
    return false;
  }
}

}  // namespace sketchkit::python
