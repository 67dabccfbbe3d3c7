#include "sketchkit/python/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "sketchkit/errors.hpp"

namespace sketchkit::python {
namespace {

constexpr std::array<std::string_view, 5> kOps3 = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array<std::string_view, 19> kOps2 = {"->", ":=", "**", "//", "<<", ">>", "<=",
                                                    ">=", "==", "!=", "+=", "-=", "*=", "/=",
                                                    "%=", "&=", "|=", "^=", "@="};
constexpr std::string_view kOps1 = "+-*/%@&|^~<>()[]{},:;.=";

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

bool is_ident_char(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_string_prefix(std::string_view p) {
  std::string lower;
  for (char c : p) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  static constexpr std::array<std::string_view, 12> kPrefixes = {
      "r", "u", "b", "f", "br", "rb", "fr", "rf", "t", "tr", "rt", ""};
  return std::find(kPrefixes.begin(), kPrefixes.end(), lower) != kPrefixes.end();
}

class Lexer {
 public:
  Lexer(std::string_view src, bool lenient) : src_(src), lenient_(lenient) {}

  std::vector<Token> run() {
    if (src_.substr(0, 3) == "\xEF\xBB\xBF") {
      pos_ = 3;
      line_start_ = 3;
    }
    while (true) {
      if (at_line_start_ && brackets_.empty() && !continuation_) {
        if (!handle_indentation()) break;
        if (pos_ >= src_.size()) break;
      }
      if (pos_ >= src_.size()) break;
      lex_one();
    }
    finish();
    return std::move(tokens_);
  }

 private:
  // Returns false at end of input.
  bool handle_indentation() {
    // `alt` measures tabs as one column; both measures must agree on the
    // nesting relation or the indentation depends on the tab size.
    std::uint32_t col = 0;
    std::uint32_t alt = 0;
    std::size_t p = pos_;
    while (p < src_.size()) {
      char c = src_[p];
      if (c == ' ') {
        ++col;
        ++alt;
      } else if (c == '\t') {
        col = (col / 8 + 1) * 8;
        ++alt;
      } else if (c == '\f') {
        col = 0;
        alt = 0;
      } else {
        break;
      }
      ++p;
    }
    pos_ = p;
    if (p >= src_.size()) return false;
    char c = src_[p];
    if (c == '#' || c == '\n' || c == '\r') {
      // Blank or comment-only lines carry no indentation meaning.
      return true;
    }
    if (c == '\\' && p + 1 < src_.size() && (src_[p + 1] == '\n' || src_[p + 1] == '\r')) {
      return true;
    }
    at_line_start_ = false;
    const char* inconsistent = "inconsistent use of tabs and spaces in indentation";
    if (col == indents_.back()) {
      if (alt != alt_indents_.back() && !lenient_) fail(inconsistent, pos_);
    } else if (col > indents_.back()) {
      if (alt <= alt_indents_.back() && !lenient_) fail(inconsistent, pos_);
      indents_.push_back(col);
      alt_indents_.push_back(alt);
      emit(TokenKind::Indent, pos_, pos_);
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        alt_indents_.pop_back();
        emit(TokenKind::Dedent, pos_, pos_);
      }
      if (col != indents_.back()) {
        if (!lenient_) fail("unindent does not match any outer indentation level", pos_);
        indents_.push_back(col);
        alt_indents_.push_back(alt);
      } else if (alt != alt_indents_.back() && !lenient_) {
        fail(inconsistent, pos_);
      }
    }
    return true;
  }

  void lex_one() {
    unsigned char c = static_cast<unsigned char>(src_[pos_]);
    if (c == ' ' || c == '\t' || c == '\f') {
      ++pos_;
      return;
    }
    if (c == '#') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
      emit(TokenKind::Comment, start, pos_);
      return;
    }
    if (c == '\n' || c == '\r') {
      std::size_t start = pos_;
      consume_newline();
      if (brackets_.empty() && line_has_content_) {
        emit(TokenKind::Newline, start, pos_);
        line_has_content_ = false;
      } else {
        emit(TokenKind::NL, start, pos_);
      }
      mark_new_line();
      at_line_start_ = brackets_.empty();
      continuation_ = false;
      return;
    }
    if (c == '\\') {
      std::size_t after = pos_ + 1;
      if (after < src_.size() && (src_[after] == '\n' || src_[after] == '\r')) {
        pos_ = after;
        consume_newline();
        mark_new_line();
        continuation_ = true;
        at_line_start_ = false;
        if (pos_ >= src_.size()) {
          if (!lenient_) fail("unexpected EOF while parsing", pos_);
        }
        return;
      }
      error_token("unexpected character after line continuation character", pos_, pos_ + 1);
      return;
    }
    continuation_ = false;
    if (is_ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"') &&
          pos_ - start <= 2 && is_string_prefix(src_.substr(start, pos_ - start))) {
        lex_string(start, pos_);
        return;
      }
      emit(TokenKind::Name, start, pos_);
      return;
    }
    if (c == '\'' || c == '"') {
      lex_string(pos_, pos_);
      return;
    }
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() &&
                        is_digit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      lex_number();
      return;
    }
    lex_op();
  }

  void lex_string(std::size_t start, std::size_t quote_pos) {
    // A backslash protects the next character even in raw strings.
    char q = src_[quote_pos];
    bool triple = quote_pos + 2 < src_.size() && src_[quote_pos + 1] == q && src_[quote_pos + 2] == q;
    std::size_t p = quote_pos + (triple ? 3 : 1);
    std::uint32_t start_line = line_;
    std::size_t start_line_start = line_start_;
    while (true) {
      if (p >= src_.size()) {
        if (!lenient_) {
          fail(triple ? "unterminated triple-quoted string literal"
                      : "unterminated string literal",
               start, start_line, start_line_start);
        }
        pos_ = p;
        emit_at(TokenKind::Error, start, p, start_line, start_line_start);
        line_has_content_ = true;
        return;
      }
      char c = src_[p];
      if (c == '\\') {
        if (p + 1 < src_.size() && (src_[p + 1] == '\r' || src_[p + 1] == '\n')) {
          pos_ = p + 1;
          consume_newline();
          mark_new_line();
          p = pos_;
        } else {
          p += 2;
        }
        continue;
      }
      if (c == '\n' || c == '\r') {
        if (!triple) {
          if (!lenient_) {
            fail("unterminated string literal", start, start_line, start_line_start);
          }
          pos_ = p;
          emit_at(TokenKind::Error, start, p, start_line, start_line_start);
          line_has_content_ = true;
          return;
        }
        pos_ = p;
        consume_newline();
        mark_new_line();
        p = pos_;
        continue;
      }
      if (c == q) {
        if (!triple) {
          ++p;
          break;
        }
        if (p + 2 < src_.size() && src_[p + 1] == q && src_[p + 2] == q) {
          p += 3;
          break;
        }
      }
      ++p;
    }
    pos_ = p;
    emit_at(TokenKind::String, start, p, start_line, start_line_start);
    line_has_content_ = true;
  }

  void lex_number() {
    std::size_t start = pos_;
    auto digits = [&](auto pred) {
      while (pos_ < src_.size() &&
             (pred(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
    };
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
        std::string_view("xXoObB").find(src_[pos_ + 1]) != std::string_view::npos) {
      char base = static_cast<char>(std::tolower(static_cast<unsigned char>(src_[pos_ + 1])));
      pos_ += 2;
      std::size_t first = pos_;
      digits([](unsigned char c) { return std::isxdigit(c) != 0; });
      if (pos_ == first) {
        const char* name = base == 'x' ? "invalid hexadecimal literal"
                           : base == 'o' ? "invalid octal literal"
                                         : "invalid binary literal";
        if (!lenient_) fail(name, pos_);
        emit(TokenKind::Error, start, pos_);
        return;
      }
    } else {
      digits(is_digit);
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        digits(is_digit);
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        if (pos_ < src_.size() && is_digit(static_cast<unsigned char>(src_[pos_]))) {
          digits(is_digit);
        } else {
          pos_ = save;
        }
      }
      bool imaginary = pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J');
      if (imaginary) ++pos_;
      std::string_view lit = src_.substr(start, pos_ - start);
      if (!imaginary && lit.size() > 1 && lit[0] == '0' &&
          lit.find_first_not_of("0123456789_") == std::string_view::npos &&
          lit.find_first_not_of("0_") != std::string_view::npos) {
        if (!lenient_) {
          fail("leading zeros in decimal integer literals are not permitted", start);
        }
        emit(TokenKind::Error, start, pos_);
        return;
      }
    }
    if (pos_ < src_.size() && is_ident_start(static_cast<unsigned char>(src_[pos_]))) {
      std::size_t bad = pos_;
      while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (!lenient_) fail("invalid decimal literal", bad);
      emit(TokenKind::Error, start, pos_);
      return;
    }
    emit(TokenKind::Number, start, pos_);
  }

  void lex_op() {
    std::string_view rest = src_.substr(pos_);
    std::size_t len = 0;
    for (auto op : kOps3) {
      if (rest.substr(0, 3) == op) {
        len = 3;
        break;
      }
    }
    if (len == 0) {
      for (auto op : kOps2) {
        if (rest.substr(0, 2) == op) {
          len = 2;
          break;
        }
      }
    }
    if (len == 0 && kOps1.find(rest[0]) != std::string_view::npos) len = 1;
    if (len == 0) {
      // One UTF-8 sequence (or a single byte) as the offending unit.
      std::size_t n = 1;
      while (pos_ + n < src_.size() && (static_cast<unsigned char>(src_[pos_ + n]) & 0xC0) == 0x80)
        ++n;
      error_token("invalid character '" + std::string(rest.substr(0, n)) + "'", pos_, pos_ + n);
      return;
    }
    char c = rest[0];
    if (len == 1 && (c == '(' || c == '[' || c == '{')) {
      brackets_.push_back(c);
    } else if (len == 1 && (c == ')' || c == ']' || c == '}')) {
      char open = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (brackets_.empty()) {
        error_token(std::string("unmatched '") + c + "'", pos_, pos_ + 1);
        return;
      }
      if (brackets_.back() != open) {
        if (!lenient_) {
          fail(std::string("closing parenthesis '") + c +
                   "' does not match opening parenthesis '" + brackets_.back() + "'",
               pos_);
        }
      }
      brackets_.pop_back();
    }
    emit(TokenKind::Op, pos_, pos_ + len);
    pos_ += len;
  }

  void finish() {
    std::size_t end = src_.size();
    if (!brackets_.empty() && !lenient_) fail("unexpected EOF in multi-line statement", end);
    if (line_has_content_) emit(TokenKind::Newline, end, end);
    while (indents_.size() > 1) {
      indents_.pop_back();
      alt_indents_.pop_back();
      emit(TokenKind::Dedent, end, end);
    }
    emit(TokenKind::EndMarker, end, end);
  }

  void consume_newline() {
    if (src_[pos_] == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
      pos_ += 2;
    } else {
      ++pos_;
    }
  }

  void mark_new_line() {
    ++line_;
    line_start_ = pos_;
  }

  void emit(TokenKind kind, std::size_t begin, std::size_t end) {
    emit_at(kind, begin, end, line_, line_start_);
    if (kind != TokenKind::Comment && kind != TokenKind::NL && kind != TokenKind::Newline &&
        kind != TokenKind::Indent && kind != TokenKind::Dedent && kind != TokenKind::EndMarker) {
      line_has_content_ = true;
    }
  }

  void emit_at(TokenKind kind, std::size_t begin, std::size_t end, std::uint32_t line,
               std::size_t line_start) {
    tokens_.push_back(Token{kind, src_.substr(begin, end - begin), static_cast<std::uint32_t>(begin),
                            static_cast<std::uint32_t>(end), line,
                            static_cast<std::uint32_t>(begin - std::min(begin, line_start))});
  }

  void error_token(const std::string& message, std::size_t begin, std::size_t end) {
    if (!lenient_) fail(message, begin);
    emit(TokenKind::Error, begin, end);
    pos_ = end;
  }

  [[noreturn]] void fail(const std::string& message, std::size_t at) {
    fail(message, at, line_, line_start_);
  }

  [[noreturn]] void fail(const std::string& message, std::size_t at, std::uint32_t line,
                         std::size_t line_start) {
    throw SyntaxError(message, line, at - std::min(at, line_start) + 1);
  }

  std::string_view src_;
  bool lenient_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::size_t line_start_ = 0;
  bool at_line_start_ = true;
  bool continuation_ = false;
  bool line_has_content_ = false;
  std::vector<std::uint32_t> indents_{0};
  std::vector<std::uint32_t> alt_indents_{0};
  std::vector<char> brackets_;
  std::vector<Token> tokens_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source, false).run(); }

std::vector<Token> tokenize_lenient(std::string_view source) { return Lexer(source, true).run(); }

const std::vector<std::string_view>& keywords() {
  static const std::vector<std::string_view> kKeywords = {
      "False", "None",   "True",    "and",      "as",     "assert", "async", "await",
      "break", "class",  "continue", "def",     "del",    "elif",   "else",  "except",
      "finally", "for",  "from",    "global",   "if",     "import", "in",    "is",
      "lambda", "nonlocal", "not",  "or",       "pass",   "raise",  "return", "try",
      "while", "with",   "yield"};
  return kKeywords;
}

bool is_keyword(std::string_view word) {
  const auto& kw = keywords();
  return std::find(kw.begin(), kw.end(), word) != kw.end();
}

}  // namespace sketchkit::python
