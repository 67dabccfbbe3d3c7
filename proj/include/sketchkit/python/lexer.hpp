#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace sketchkit::python {

enum class TokenKind : std::uint8_t {
  Name,
  Number,
  String,
  Op,
  Newline,  // end of a logical line
  NL,       // non-logical line break (blank line, inside brackets)
  Comment,
  Indent,
  Dedent,
  EndMarker,
  Error,  // only produced in lenient mode
};

struct Token {
  TokenKind kind;
  std::string_view text;  // view into the lexed source
  std::uint32_t begin;    // byte offsets, [begin, end)
  std::uint32_t end;
  std::uint32_t line;  // 1-based
  std::uint32_t col;   // 0-based byte column

  bool is_op(std::string_view op) const { return kind == TokenKind::Op && text == op; }
  bool is_name(std::string_view name) const { return kind == TokenKind::Name && text == name; }
};

/// Tokenizes Python source. Throws SyntaxError on the first lexical error.
/// The returned tokens view into `source`, which must outlive them.
std::vector<Token> tokenize(std::string_view source);

/// Same token stream, but never throws: bytes that cannot start a token,
/// unterminated strings and bracket mismatches become Error tokens.
std::vector<Token> tokenize_lenient(std::string_view source);

/// Reserved words of Python 3 (soft keywords such as `match` excluded).
bool is_keyword(std::string_view word);
const std::vector<std::string_view>& keywords();

}  // namespace sketchkit::python
