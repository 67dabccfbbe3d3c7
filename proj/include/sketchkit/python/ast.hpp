#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sketchkit::python {

// Node kinds mirror the class names of Python's own `ast` module, so
// structural labels read the same as `ast.dump` output.
#define SKETCHKIT_PY_NODE_KINDS(X)                                                             \
  X(Module) X(FunctionDef) X(AsyncFunctionDef) X(ClassDef) X(Return) X(Delete) X(Assign)       \
  X(AugAssign) X(AnnAssign) X(For) X(AsyncFor) X(While) X(If) X(With) X(AsyncWith) X(Match)    \
  X(Raise) X(Try) X(TryStar) X(Assert) X(Import) X(ImportFrom) X(Global) X(Nonlocal) X(Expr)   \
  X(Pass) X(Break) X(Continue)                                                                 \
  X(BoolOp) X(NamedExpr) X(BinOp) X(UnaryOp) X(Lambda) X(IfExp) X(Dict) X(Set) X(ListComp)     \
  X(SetComp) X(DictComp) X(GeneratorExp) X(Await) X(Yield) X(YieldFrom) X(Compare) X(Call)     \
  X(JoinedStr) X(Constant) X(Attribute) X(Subscript) X(Starred) X(DoubleStarred) X(Name)       \
  X(List) X(Tuple) X(Slice)                                                                    \
  X(And) X(Or) X(Add) X(Sub) X(Mult) X(MatMult) X(Div) X(Mod) X(Pow) X(LShift) X(RShift)       \
  X(BitOr) X(BitXor) X(BitAnd) X(FloorDiv) X(Invert) X(Not) X(UAdd) X(USub) X(Eq) X(NotEq)     \
  X(Lt) X(LtE) X(Gt) X(GtE) X(Is) X(IsNot) X(In) X(NotIn)                                      \
  X(comprehension) X(ExceptHandler) X(arguments) X(arg) X(keyword) X(alias) X(withitem)        \
  X(match_case) X(MatchValue) X(MatchSingleton) X(MatchSequence) X(MatchMapping)              \
  X(MatchClass) X(MatchStar) X(MatchAs) X(MatchOr)

enum class Kind : std::uint8_t {
#define SKETCHKIT_X(name) name,
  SKETCHKIT_PY_NODE_KINDS(SKETCHKIT_X)
#undef SKETCHKIT_X
};

std::string_view kind_name(Kind kind);

/// Constant literal categories, stored in Node::flag for Constant/JoinedStr.
enum class Literal : std::uint8_t { None = 0, Str, Bytes, Number, Ellipsis, Singleton };

/// Parameter categories, stored in Node::flag for `arg`.
enum class ParamKind : std::uint8_t { Positional = 0, VarArgs, KwArgs };

/// One syntax node. Children are kept in source order; kinds whose
/// children fall into several groups record the group boundaries:
///
///   FunctionDef   [decorator*, arguments, returns?, body+]
///                 split[0] = #decorators, split[1] = body start,
///                 split[2] = offset of the `async`/`def` keyword
///   ClassDef      [decorator*, base/keyword*, body+]
///                 split[0] = #decorators, split[1] = body start,
///                 split[2] = offset of the `class` keyword
///   For           [target, iter, body+, orelse*]     split[1] = orelse start
///   While / If    [test, body+, orelse*]             split[1] = orelse start
///   With          [withitem+, body+]                 split[0] = body start
///   Try           [body+, handler*, orelse*, final*]
///                 split[0] = handlers, split[1] = orelse, split[2] = finalbody
///   ExceptHandler [type?, body+]                     split[0] = body start
///   match_case    [pattern, guard?, body+]           split[0] = body start
///   arg           [annotation?, default?]            split[0] = has annotation
///   Slice         [lower?, upper?, step?]            split[0] = presence bitmask
///
/// `name` holds identifiers (Name.id, Attribute.attr, def/class names,
/// arg names, keyword names, alias names, ImportFrom module) and
/// `asname` holds alias renames and the `**rest` of a mapping pattern.
/// Global/Nonlocal keep their names comma-joined in `name`. ImportFrom
/// stores its relative-import level in `flag`; comprehension sets `flag`
/// when async.
struct Node {
  Kind kind;
  std::uint8_t flag = 0;
  std::uint32_t begin = 0;  // byte span in the source
  std::uint32_t end = 0;
  std::uint32_t line = 0;
  std::uint32_t colon = 0;  // compound statements: offset just past the header ':'
  std::uint32_t split[3] = {0, 0, 0};
  std::string name;
  std::string asname;
  std::vector<const Node*> children;

  std::span<const Node* const> child_range(std::size_t from, std::size_t to) const {
    return std::span<const Node* const>(children).subspan(from, to - from);
  }
};

bool is_function_def(const Node& node);
bool is_statement(Kind kind);

/// The statements that make up the suite of a FunctionDef/ClassDef.
std::span<const Node* const> body_of(const Node& node);

/// A parsed module. Owns every node and a copy of the source text.
class Tree {
 public:
  Tree(std::string source, std::unique_ptr<std::deque<Node>> arena, const Node* root)
      : source_(std::move(source)), arena_(std::move(arena)), root_(root) {}

  const Node& root() const { return *root_; }
  std::string_view source() const { return source_; }
  std::string_view text(const Node& node) const {
    return std::string_view(source_).substr(node.begin, node.end - node.begin);
  }
  std::size_t node_count() const { return arena_->size(); }

 private:
  std::string source_;
  std::unique_ptr<std::deque<Node>> arena_;
  const Node* root_;
};

/// Parses a complete module. Throws SyntaxError.
Tree parse(std::string source);

/// True when `source` parses with zero syntax errors.
bool parses(std::string_view source);

/// Depth-first preorder traversal.
template <typename Visitor>
void walk(const Node& node, Visitor&& visit) {
  visit(node);
  for (const Node* child : node.children) walk(*child, visit);
}

}  // namespace sketchkit::python
