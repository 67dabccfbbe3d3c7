#include "sketchkit/extract.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "sketchkit/errors.hpp"
#include "sketchkit/python/lexer.hpp"

namespace sketchkit {
namespace {

using python::Kind;
using python::Node;

enum class Form { Block, Inline, Empty };

struct SlotInfo {
  FunctionSlot slot;
  Form form = Form::Block;
  std::string indent;         // indentation of the body lines
  std::string header_indent;  // indentation of the `def` line
  std::size_t colon = 0;
};

std::size_t line_start(std::string_view s, std::size_t pos) {
  while (pos > 0 && s[pos - 1] != '\n') --pos;
  return pos;
}

std::size_t line_end(std::string_view s, std::size_t pos) {
  std::size_t nl = s.find('\n', pos);
  return nl == std::string_view::npos ? s.size() : nl;
}

std::string leading_ws(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return std::string(line.substr(0, n));
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f'; });
}

bool is_docstring(const Node& stmt) {
  return stmt.kind == Kind::Expr && stmt.children.size() == 1 &&
         stmt.children[0]->kind == Kind::Constant &&
         stmt.children[0]->flag == static_cast<std::uint8_t>(python::Literal::Str);
}

bool compound(Kind k) {
  switch (k) {
    case Kind::If: case Kind::For: case Kind::AsyncFor: case Kind::While: case Kind::Try:
    case Kind::TryStar: case Kind::With: case Kind::AsyncWith: case Kind::Match:
    case Kind::ExceptHandler: case Kind::match_case:
      return true;
    default:
      return false;
  }
}

void collect(std::span<const Node* const> stmts, const std::string& prefix, std::vector<SlotNode>& out) {
  for (const Node* stmt : stmts) {
    if (python::is_function_def(*stmt)) {
      out.push_back({prefix + stmt->name, stmt});
    } else if (stmt->kind == Kind::ClassDef) {
      collect(python::body_of(*stmt), prefix + stmt->name + ".", out);
    } else if (compound(stmt->kind)) {
      std::vector<const Node*> inner;
      for (const Node* c : stmt->children) {
        if (python::is_statement(c->kind) || c->kind == Kind::ExceptHandler || c->kind == Kind::match_case) {
          inner.push_back(c);
        }
      }
      collect(inner, prefix, out);
    }
  }
}

SlotInfo describe(std::string_view src, const SlotNode& sn) {
  const Node& fn = *sn.node;
  SlotInfo info;
  info.colon = fn.colon;
  info.slot.qualified_name = sn.qualified_name;
  info.slot.signature = std::string(src.substr(fn.split[2], fn.colon - fn.split[2]));
  std::size_t def_line = line_start(src, fn.split[2]);
  info.header_indent = leading_ws(src.substr(def_line));

  auto body = python::body_of(fn);
  std::size_t first = 0;
  if (is_docstring(*body[0]) && src.substr(fn.colon, body[0]->begin - fn.colon).find('\n') != std::string_view::npos) {
    info.slot.has_docstring = true;
    first = 1;
  }
  if (first == body.size()) {
    const Node& doc = *body[0];
    std::size_t ls = line_start(src, doc.begin);
    info.form = Form::Empty;
    info.indent = leading_ws(src.substr(ls));
    info.slot.begin = info.slot.end = line_end(src, doc.end);
    return info;
  }
  const Node& head = *body[first];
  const Node& tail = *body.back();
  std::size_t ls = line_start(src, head.begin);
  std::size_t end = line_end(src, tail.end);
  if (ls >= fn.colon && blank(src.substr(ls, head.begin - ls))) {
    info.form = Form::Block;
    info.indent = std::string(src.substr(ls, head.begin - ls));
    info.slot.begin = ls;
  } else {
    info.form = Form::Inline;
    info.indent = info.header_indent + "    ";
    info.slot.begin = head.begin;
  }
  info.slot.end = end;
  info.slot.body = std::string(src.substr(info.slot.begin, end - info.slot.begin));
  return info;
}

std::vector<SlotInfo> describe_all(const python::Tree& tree) {
  std::vector<SlotInfo> out;
  for (const SlotNode& sn : slot_nodes(tree)) out.push_back(describe(tree.source(), sn));
  return out;
}

struct Edit {
  std::size_t begin;
  std::size_t end;
  std::string text;
};

std::string apply(std::string_view src, std::vector<Edit> edits) {
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.begin < b.begin; });
  std::string out;
  std::size_t pos = 0;
  for (const Edit& e : edits) {
    out.append(src.substr(pos, e.begin - pos));
    out += e.text;
    pos = e.end;
  }
  out.append(src.substr(pos));
  return out;
}

// Drops blank lines before the first and after the last non-blank line.
std::string trim_blank_edges(std::string_view body) {
  std::size_t first = std::string_view::npos;
  std::size_t last = 0;
  for (std::size_t pos = 0;;) {
    std::size_t e = line_end(body, pos);
    if (!blank(body.substr(pos, e - pos))) {
      if (first == std::string_view::npos) first = pos;
      last = e;
    }
    if (e == body.size()) break;
    pos = e + 1;
  }
  if (first == std::string_view::npos) return {};
  return std::string(body.substr(first, last - first));
}

Edit splice_edit(std::string_view src, const SlotInfo& info, std::string_view body) {
  const FunctionSlot& s = info.slot;
  std::string text = trim_blank_edges(body);
  if (blank(text)) {
    if (s.has_docstring) {
      if (info.form == Form::Empty) return {s.begin, s.end, ""};
      std::size_t from = info.form == Form::Block ? s.begin : line_start(src, s.begin);
      return {from > 0 ? from - 1 : from, s.end, ""};
    }
    return {s.begin, s.end, info.form == Form::Block ? info.indent + std::string(kPlaceholder) : std::string(kPlaceholder)};
  }
  switch (info.form) {
    case Form::Block:
      return {s.begin, s.end, reindent_block(text, info.indent)};
    case Form::Empty:
      return {s.begin, s.end, "\n" + reindent_block(text, info.indent)};
    case Form::Inline: {
      std::string flat = reindent_block(text, "");
      if (flat.find('\n') == std::string::npos) return {s.begin, s.end, flat};
      return {info.colon, s.end, "\n" + reindent_block(text, info.indent)};
    }
  }
  return {s.begin, s.end, std::string(body)};
}

}  // namespace

std::vector<SlotNode> slot_nodes(const python::Tree& tree) {
  std::vector<SlotNode> out;
  collect(tree.root().children, "", out);
  std::unordered_map<std::string, int> seen;
  for (SlotNode& s : out) {
    int n = ++seen[s.qualified_name];
    if (n > 1) s.qualified_name += "#" + std::to_string(n);
  }
  return out;
}

FileSketch extract_file_sketch(std::string_view source, std::string path) {
  python::Tree tree = [&] {
    try {
      return python::parse(std::string(source));
    } catch (const SyntaxError& e) {
      throw e.with_path(path);
    }
  }();
  FileSketch sketch;
  sketch.path = path;
  std::vector<Edit> edits;
  for (SlotInfo& info : describe_all(tree)) {
    info.slot.file_path = path;
    const FunctionSlot& s = info.slot;
    switch (info.form) {
      case Form::Block:
        edits.push_back({s.begin, s.end, info.indent + std::string(kPlaceholder)});
        break;
      case Form::Inline:
        edits.push_back({s.begin, s.end, std::string(kPlaceholder)});
        break;
      case Form::Empty:
        edits.push_back({s.begin, s.end, "\n" + info.indent + std::string(kPlaceholder)});
        break;
    }
    sketch.slots.push_back(std::move(info.slot));
  }
  sketch.source = apply(source, std::move(edits));
  return sketch;
}

std::string splice_bodies(std::string_view sketch_source, const std::map<std::string, std::string>& bodies) {
  python::Tree tree = python::parse(std::string(sketch_source));
  std::vector<SlotInfo> infos = describe_all(tree);
  std::vector<Edit> edits;
  for (const auto& [name, body] : bodies) {
    auto it = std::find_if(infos.begin(), infos.end(),
                           [&](const SlotInfo& i) { return i.slot.qualified_name == name; });
    if (it == infos.end()) throw SlotNotFound(name);
    edits.push_back(splice_edit(sketch_source, *it, body));
  }
  return apply(sketch_source, std::move(edits));
}

std::string splice_function_body(std::string_view sketch_source, std::string_view qualified_name,
                                 std::string_view body) {
  return splice_bodies(sketch_source, {{std::string(qualified_name), std::string(body)}});
}

std::string reindent_block(std::string_view body, std::string_view indent) {
  std::string text = trim_blank_edges(body);
  if (blank(text)) return {};

  // Classify each line: statement start, inside a string, or other.
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0;;) {
    std::size_t e = line_end(text, pos);
    lines.emplace_back(std::string_view(text).substr(pos, e - pos));
    if (e == text.size()) break;
    pos = e + 1;
  }
  std::vector<char> in_string(lines.size() + 2, 0);
  std::vector<char> stmt_start(lines.size() + 2, 0);
  bool at_start = true;
  for (const python::Token& t : python::tokenize_lenient(text)) {
    using python::TokenKind;
    if (t.kind == TokenKind::String) {
      std::uint32_t last = t.line + static_cast<std::uint32_t>(std::count(t.text.begin(), t.text.end(), '\n'));
      for (std::uint32_t l = t.line + 1; l <= last && l <= lines.size(); ++l) in_string[l] = 1;
    }
    switch (t.kind) {
      case TokenKind::Newline:
        at_start = true;
        break;
      case TokenKind::NL: case TokenKind::Comment: case TokenKind::Indent: case TokenKind::Dedent:
      case TokenKind::EndMarker:
        break;
      default:
        if (at_start && t.line <= lines.size()) stmt_start[t.line] = 1;
        at_start = false;
    }
  }

  std::string base;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (stmt_start[i + 1]) {
      base = leading_ws(lines[i]);
      break;
    }
  }

  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (i) out += '\n';
    if (in_string[i + 1]) {
      out += line;
      continue;
    }
    if (blank(line)) continue;
    std::string ws = leading_ws(line);
    if (ws.starts_with(base)) {
      out += indent;
      out += line.substr(base.size());
    } else if (stmt_start[i + 1]) {
      throw IndentationError("line " + std::to_string(i + 1) + ": statement indented less than the first line of the block");
    } else if (line.substr(ws.size()).starts_with('#')) {
      out += indent;
      out += line.substr(ws.size());
    } else {
      out += line;
    }
  }
  return out;
}

std::string canonical_format(std::string_view source) {
  std::string text;
  text.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i] == '\r') {
      text += '\n';
      if (i + 1 < source.size() && source[i + 1] == '\n') ++i;
    } else {
      text += source[i];
    }
  }
  // Line ends that fall inside a string literal must keep their spaces.
  std::set<std::uint32_t> keep;
  for (const python::Token& t : python::tokenize_lenient(text)) {
    if (t.kind != python::TokenKind::String) continue;
    std::uint32_t n = static_cast<std::uint32_t>(std::count(t.text.begin(), t.text.end(), '\n'));
    for (std::uint32_t k = 0; k < n; ++k) keep.insert(t.line + k);
  }
  std::string out;
  std::uint32_t lineno = 1;
  for (std::size_t pos = 0; pos <= text.size();) {
    std::size_t e = line_end(text, pos);
    std::string_view line = std::string_view(text).substr(pos, e - pos);
    if (!keep.count(lineno)) {
      while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\f')) line.remove_suffix(1);
    }
    out += line;
    if (e == text.size()) break;
    out += '\n';
    pos = e + 1;
    ++lineno;
  }
  while (!out.empty() && out.back() == '\n') out.pop_back();
  if (!out.empty()) out += '\n';
  return out;
}

}  // namespace sketchkit
