#include "sketchkit/repo_sketch.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "sketchkit/errors.hpp"

namespace sketchkit {
namespace {

constexpr std::string_view kPipe = "│   ";
constexpr std::string_view kBlank = "    ";
constexpr std::string_view kTee = "├── ";
constexpr std::string_view kElbow = "└── ";
constexpr std::string_view kAnnotation = "  # imports: ";

bool starts_with_glyph(std::string_view s) {
  return s.starts_with("├") || s.starts_with("└") || s.starts_with("│");
}

std::vector<std::string> split_imports(std::string_view list) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t comma = list.find(", ", pos);
    std::size_t end = comma == std::string_view::npos ? list.size() : comma;
    if (end > pos) out.emplace_back(list.substr(pos, end - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 2;
  }
  return out;
}

void render_entries(const std::vector<SketchEntry>& entries, const std::string& prefix,
                    std::string& out) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const SketchEntry& e = entries[i];
    bool last = i + 1 == entries.size();
    out += '\n';
    out += prefix;
    out += last ? kElbow : kTee;
    out += e.name;
    if (e.is_dir && e.children.empty()) out += '/';
    if (!e.is_dir && !e.imports.empty()) {
      out += kAnnotation;
      for (std::size_t k = 0; k < e.imports.size(); ++k) {
        if (k) out += ", ";
        out += e.imports[k];
      }
    }
    if (e.is_dir) render_entries(e.children, prefix + std::string(last ? kBlank : kPipe), out);
  }
}

void walk_entries(const std::vector<SketchEntry>& entries, const std::string& prefix,
                  const std::function<void(const SketchEntry&, const std::string&)>& visit) {
  for (const SketchEntry& e : entries) {
    std::string path = prefix.empty() ? e.name : prefix + "/" + e.name;
    visit(e, path);
    if (e.is_dir) walk_entries(e.children, path, visit);
  }
}

}  // namespace

bool is_code_path(std::string_view path) { return path.ends_with(".py"); }

RepoSketch parse_repo_sketch(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, end - pos);
    if (line.ends_with('\r')) line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (lines.empty() || lines[0].empty()) throw SketchParseError(1, "missing root name");
  if (starts_with_glyph(lines[0])) throw SketchParseError(1, "root line carries a tree connector");

  RepoSketch sketch;
  sketch.root_name = std::string(lines[0]);

  // open[d] is the entry list receiving entries at depth d.
  std::vector<std::vector<SketchEntry>*> open{&sketch.entries};
  std::vector<std::size_t> annotated_line;  // per open depth: line of the annotated parent, or 0
  annotated_line.push_back(0);
  std::vector<std::set<std::string>> names{{}};

  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::size_t lineno = i + 1;
    std::string_view line = lines[i];
    if (line.empty()) throw SketchParseError(lineno, "blank line inside the tree");
    std::size_t depth = 0;
    std::size_t p = 0;
    while (true) {
      if (line.substr(p).starts_with(kPipe)) {
        p += kPipe.size();
      } else if (line.substr(p).starts_with(kBlank)) {
        p += kBlank.size();
      } else {
        break;
      }
      ++depth;
    }
    std::string_view rest = line.substr(p);
    if (!rest.starts_with(kTee) && !rest.starts_with(kElbow)) {
      throw SketchParseError(lineno, "malformed indentation: expected a tree connector");
    }
    rest.remove_prefix(kTee.size());
    if (rest.empty() || starts_with_glyph(rest) || rest.front() == ' ' || rest.front() == '\t') {
      throw SketchParseError(lineno, "malformed indentation: entry name expected after connector");
    }
    if (depth >= open.size()) throw SketchParseError(lineno, "malformed indentation: level skipped");
    if (rest.back() == ' ' || rest.back() == '\t') {
      throw SketchParseError(lineno, "trailing whitespace");
    }

    SketchEntry entry;
    bool annotated = false;
    std::size_t mark = rest.find(kAnnotation);
    if (mark == std::string_view::npos && rest.ends_with(kAnnotation.substr(0, kAnnotation.size() - 1))) {
      mark = rest.size() - (kAnnotation.size() - 1);
    }
    if (mark != std::string_view::npos) {
      annotated = true;
      std::string_view list = rest.substr(std::min(rest.size(), mark + kAnnotation.size()));
      entry.imports = split_imports(list);
      rest = rest.substr(0, mark);
    }
    if (rest.ends_with('/')) {
      if (annotated) throw SketchParseError(lineno, "annotation on a directory entry");
      entry.is_dir = true;
      rest.remove_suffix(1);
    }
    if (rest.empty() || rest.find('/') != std::string_view::npos) {
      throw SketchParseError(lineno, "invalid entry name");
    }
    entry.name = std::string(rest);

    open.resize(depth + 1);
    annotated_line.resize(depth + 1);
    names.resize(depth + 1);
    if (annotated_line[depth] != 0) {
      throw SketchParseError(annotated_line[depth], "annotation on a directory entry");
    }
    if (!names[depth].insert(entry.name).second) {
      throw SketchParseError(lineno, "duplicate entry name '" + entry.name + "'");
    }
    std::vector<SketchEntry>& siblings = *open[depth];
    siblings.push_back(std::move(entry));
    SketchEntry& placed = siblings.back();
    open.push_back(&placed.children);
    annotated_line.push_back(annotated ? lineno : 0);
    names.emplace_back();
  }

  std::function<void(std::vector<SketchEntry>&)> settle = [&](std::vector<SketchEntry>& es) {
    for (SketchEntry& e : es) {
      if (!e.children.empty()) e.is_dir = true;
      settle(e.children);
    }
  };
  settle(sketch.entries);
  return sketch;
}

std::string render_repo_sketch(const RepoSketch& sketch) {
  std::string out = sketch.root_name;
  render_entries(sketch.entries, "", out);
  return out;
}

std::vector<std::string> RepoSketch::file_paths() const {
  std::vector<std::string> out;
  walk_entries(entries, "", [&](const SketchEntry& e, const std::string& path) {
    if (!e.is_dir) out.push_back(path);
  });
  return out;
}

std::vector<std::string> RepoSketch::code_paths() const {
  std::vector<std::string> out;
  for (std::string& p : file_paths()) {
    if (is_code_path(p)) out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> RepoSketch::dir_paths() const {
  std::vector<std::string> out;
  walk_entries(entries, "", [&](const SketchEntry& e, const std::string& path) {
    if (e.is_dir) out.push_back(path);
  });
  return out;
}

const SketchEntry* RepoSketch::find(std::string_view path) const {
  const std::vector<SketchEntry>* level = &entries;
  const SketchEntry* found = nullptr;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    std::size_t slash = path.find('/', pos);
    std::string_view part = path.substr(pos, slash == std::string_view::npos ? path.npos : slash - pos);
    auto it = std::find_if(level->begin(), level->end(),
                           [&](const SketchEntry& e) { return e.name == part; });
    if (it == level->end()) return nullptr;
    found = &*it;
    if (slash == std::string_view::npos) break;
    level = &it->children;
    pos = slash + 1;
  }
  return found;
}

const std::vector<std::string>& RepoSketch::imports_of(std::string_view path) const {
  static const std::vector<std::string> kNone;
  const SketchEntry* e = find(path);
  return e && !e->is_dir ? e->imports : kNone;
}

std::vector<std::string> dangling_imports(const RepoSketch& sketch) {
  std::vector<std::string> code = sketch.code_paths();
  std::set<std::string> known(code.begin(), code.end());
  std::vector<std::string> out;
  for (const std::string& path : sketch.file_paths()) {
    for (const std::string& target : sketch.imports_of(path)) {
      if (!known.count(target)) out.push_back(path + " -> " + target);
    }
  }
  return out;
}

void insert_sorted(RepoSketch& sketch, std::string_view path, std::vector<std::string> imports) {
  std::vector<SketchEntry>* level = &sketch.entries;
  std::size_t pos = 0;
  while (true) {
    std::size_t slash = path.find('/', pos);
    bool leaf = slash == std::string_view::npos;
    std::string name(path.substr(pos, leaf ? path.npos : slash - pos));
    auto it = std::lower_bound(level->begin(), level->end(), name,
                               [](const SketchEntry& e, const std::string& n) { return e.name < n; });
    if (it == level->end() || it->name != name) {
      SketchEntry e;
      e.name = name;
      e.is_dir = !leaf;
      it = level->insert(it, std::move(e));
    }
    if (leaf) {
      it->imports = std::move(imports);
      return;
    }
    it->is_dir = true;
    level = &it->children;
    pos = slash + 1;
  }
}

}  // namespace sketchkit
