#include <gtest/gtest.h>

#include "sketchkit/errors.hpp"
#include "sketchkit/python/ast.hpp"
#include "sketchkit/python/lexer.hpp"

using namespace sketchkit;
using namespace sketchkit::python;

namespace {

// Every entry was checked against CPython's own parser.
const std::vector<std::string> kAccepted = {
    R"py(x = 1
)py",
    R"py(def f(a, b=2, *args, c, d=4, **kw) -> int:
    return a
)py",
    R"py(def g(a, /, b):
    pass
)py",
    R"py(async def h():
    async for x in y:
        await x
    async with a as b, c:
        pass
)py",
    R"py(class A(B, metaclass=M):
    @property
    def x(self): return 1
)py",
    R"py(if a:
    pass
elif b:
    pass
else:
    pass
)py",
    R"py(while x:
    break
else:
    continue_ = 1
)py",
    R"py(try:
    pass
except (A, B) as e:
    raise X from e
else:
    pass
finally:
    pass
)py",
    R"py(with open(p) as f, lock:
    data = f.read()
)py",
    R"py(match cmd:
    case [x, *rest]:
        pass
    case {'k': v, **others}:
        pass
    case Point(x=0, y=_) | None:
        pass
    case _:
        pass
)py",
    R"py(match = 1
case = match + 1
)py",
    R"py(y = [i * 2 for i in range(10) if i % 2]
z = {k: v for k, v in d.items()}
s = {a for a in b}
g = (x for x in y)
)py",
    R"py(f = lambda x, *y, **z: (x, y, z)
)py",
    R"py(if (n := len(a)) > 10:
    pass
)py",
    R"py(s = f'{a!r:>{width}} {b}'
)py",
    R"py(t = 'a' 'b' "c" r'\d'
u = b'x' rb'y'
)py",
    R"py(x: int = 5
y: list[int]
)py",
    R"py(a, *b = c
a[1:2, ::3] = x
)py",
    R"py(from . import x
from ..pkg.mod import (a as b, c)
import os.path as p
)py",
    R"py(global g
nonlocal_ = 1
del a[0], b.c
assert x, 'msg'
)py",
    R"py(x = not a and b or c if d else e
)py",
    R"py(x = a @ b ** -c // d << e | f ^ g & ~h
)py",
    R"py(x = 1 < 2 <= 3 is not None not in []
)py",
    R"py(def gen():
    yield
    yield 1
    x = yield from g()
)py",
    R"py(x = \
    1
)py",
    R"py(s = '''multi
line'''
)py",
    R"py(print(*args, **kwargs, sep='')
)py",
    R"py(x = 0x1F + 0o7 + 0b1 + 1_000 + 1.5e-3 + 2j + ...
)py",
    R"py(@dec(1)
@other
class C: pass
)py",
    R"py(if x: y = 1; z = 2
)py"};

const std::vector<std::string> kRejected = {
    R"py(def f(:
    pass
)py",
    R"py(x = (1, 2
)py",
    R"py(if x
    pass
)py",
    R"py(def f():
return 1
)py",
    R"py(  x = 1
)py",
    R"py(x = 1
  y = 2
)py",
    R"py(class :
    pass
)py",
    R"py(s = 'unterminated
)py",
    R"py(for x in :
    pass
)py",
    R"py(x = = 1
)py",
    R"py(return = 3
)py",
    R"py(def f(a, a=1, b):
    pass
)py",
    R"py(lambda: (yield)
x = ]
)py",
    R"py(f(**a, *b)
)py"};

std::vector<std::string> preorder(const Tree& tree) {
  std::vector<std::string> kinds;
  walk(tree.root(), [&](const Node& n) { kinds.emplace_back(kind_name(n.kind)); });
  return kinds;
}

}  // namespace

TEST(PythonParser, AcceptsValidPrograms) {
  for (const std::string& src : kAccepted) {
    EXPECT_NO_THROW(parse(src)) << src;
    EXPECT_TRUE(parses(src)) << src;
  }
}

TEST(PythonParser, RejectsInvalidPrograms) {
  for (const std::string& src : kRejected) {
    EXPECT_THROW(parse(src), SyntaxError) << src;
    EXPECT_FALSE(parses(src)) << src;
  }
}

TEST(PythonParser, ExceptStar) { EXPECT_TRUE(parses("try:\n    pass\nexcept* ValueError:\n    pass\n")); }

TEST(PythonParser, SmallestFunctionShape) {
  Tree tree = parse("def f(x):\n    return x\n");
  EXPECT_EQ(preorder(tree),
            (std::vector<std::string>{"Module", "FunctionDef", "arguments", "arg", "Return", "Name"}));
  const Node& def = *tree.root().children[0];
  EXPECT_EQ(def.name, "f");
  EXPECT_TRUE(is_function_def(def));
  ASSERT_EQ(body_of(def).size(), 1u);
  EXPECT_EQ(tree.text(*body_of(def)[0]), "return x");
}

TEST(PythonParser, BinaryExpressionShape) {
  Tree tree = parse("y = a + b * c\n");
  EXPECT_EQ(preorder(tree), (std::vector<std::string>{"Module", "Assign", "Name", "BinOp", "Name", "Add", "BinOp",
                                                      "Name", "Mult", "Name"}));
}

TEST(PythonParser, SyntaxErrorLocation) {
  try {
    parse("x = 1\ny = (2,\nz = 3 +\n");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_GE(e.line(), 2u);
    EXPECT_EQ(e.with_path("a.py").path(), "a.py");
  }
  try {
    parse("def f(:\n    pass\n");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(PythonParser, DecoratorsAndClassesKeepSpans) {
  std::string src = "@dec\nclass C(Base):\n    def m(self):\n        return 1\n";
  Tree tree = parse(src);
  const Node& cls = *tree.root().children[0];
  EXPECT_EQ(cls.kind, Kind::ClassDef);
  EXPECT_EQ(cls.split[0], 1u);
  EXPECT_EQ(src.substr(cls.split[2], 5), "class");
  const Node& m = *body_of(cls)[0];
  EXPECT_EQ(m.name, "m");
  EXPECT_EQ(src.substr(m.colon - 1, 1), ":");
}

TEST(PythonLexer, TokenKinds) {
  std::string src = "if x:\n    y = 'a'  # c\n";
  std::vector<TokenKind> kinds;
  for (const Token& t : tokenize(src)) kinds.push_back(t.kind);
  EXPECT_EQ(kinds, (std::vector<TokenKind>{TokenKind::Name, TokenKind::Name, TokenKind::Op, TokenKind::Newline,
                                           TokenKind::Indent, TokenKind::Name, TokenKind::Op, TokenKind::String,
                                           TokenKind::Comment, TokenKind::Newline, TokenKind::Dedent,
                                           TokenKind::EndMarker}));
}

TEST(PythonLexer, LenientNeverThrows) {
  for (const std::string& src : kRejected) EXPECT_NO_THROW(tokenize_lenient(src)) << src;
  auto toks = tokenize_lenient("x = 'open\n$");
  bool has_error = false;
  for (const Token& t : toks) has_error = has_error || t.kind == TokenKind::Error;
  EXPECT_TRUE(has_error);
  EXPECT_THROW(tokenize("x = 'open\n"), SyntaxError);
}

TEST(PythonLexer, Keywords) {
  EXPECT_TRUE(is_keyword("def"));
  EXPECT_TRUE(is_keyword("None"));
  EXPECT_FALSE(is_keyword("match"));
  EXPECT_FALSE(is_keyword("print"));
  EXPECT_EQ(keywords().size(), 35u);
}
