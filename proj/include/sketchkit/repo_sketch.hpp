#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sketchkit {

struct SketchEntry {
  std::string name;
  bool is_dir = false;
  std::vector<std::string> imports;  // repository-relative paths; code files only
  std::vector<SketchEntry> children;

  bool operator==(const SketchEntry&) const = default;
};

/// Directory tree of a repository with per-file import annotations.
struct RepoSketch {
  std::string root_name;
  std::vector<SketchEntry> entries;

  bool operator==(const RepoSketch&) const = default;

  /// Repository-relative paths of every file entry, in tree order.
  std::vector<std::string> file_paths() const;
  /// File entries with a code extension, in tree order.
  std::vector<std::string> code_paths() const;
  /// Every directory path, in tree order.
  std::vector<std::string> dir_paths() const;
  const SketchEntry* find(std::string_view path) const;
  /// Imports of the file at `path`; empty when absent.
  const std::vector<std::string>& imports_of(std::string_view path) const;
};

bool is_code_path(std::string_view path);

RepoSketch parse_repo_sketch(std::string_view text);
std::string render_repo_sketch(const RepoSketch& sketch);

/// Import targets that do not name a code file of the same sketch,
/// formatted as "importer -> target".
std::vector<std::string> dangling_imports(const RepoSketch& sketch);

/// Inserts a file at `path`, creating directories as needed; entries of
/// each directory stay sorted by name.
void insert_sorted(RepoSketch& sketch, std::string_view path, std::vector<std::string> imports);

}  // namespace sketchkit
