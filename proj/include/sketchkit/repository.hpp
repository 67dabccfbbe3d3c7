#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sketchkit {

struct RepoFile {
  std::string path;  // repository-relative, '/'-separated
  std::string content;
  bool is_code = false;
};

/// A repository snapshot. Files are sorted by path.
struct Repository {
  std::string name;
  std::filesystem::path root_path;
  std::vector<RepoFile> files;

  const RepoFile* find(std::string_view path) const;
  std::vector<const RepoFile*> code_files() const;
  bool operator==(const Repository& other) const;
};

struct ScanOptions {
  /// Glob patterns matched against each path segment.
  std::vector<std::string> ignore = {".git",        ".hg",         ".svn",        "__pycache__",
                                     ".mypy_cache", ".pytest_cache", ".ruff_cache", ".tox",
                                     ".nox",        ".venv",       "venv",        ".idea",
                                     ".vscode",     ".DS_Store",   "*.pyc",       "*.pyo",
                                     "*.egg-info",  ".eggs",       "node_modules"};
};

/// Reads every file under `root`, skipping ignored segments.
/// Throws NotADirectory or IoError.
Repository scan_repository(const std::filesystem::path& root, const ScanOptions& options = {});

/// Builds an in-memory repository; paths are normalized and sorted.
/// Throws IoError on duplicate or escaping paths.
Repository make_repository(std::string name, std::vector<RepoFile> files);

/// Normalizes a relative path: '/' separators, no '.' or '..' segments.
/// Throws IoError when the path escapes its root.
std::string normalize_relative_path(std::string_view path);

bool is_valid_utf8(std::string_view text);

/// Locates README.md, README.rst or README (case-insensitive) at the root.
const RepoFile* find_readme(const Repository& repo);

}  // namespace sketchkit
