#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "sketchkit/backend.hpp"
#include "sketchkit/repository.hpp"

namespace testsupport {

namespace fs = std::filesystem;

fs::path fixtures();
fs::path fixture(const std::string& relative);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, const std::string& text);

/// Every regular file below `root`, keyed by '/'-separated relative path.
std::map<std::string, std::string> read_tree(const fs::path& root);

/// Answers every stage with the artifacts extracted from `reference`.
sketchkit::ScriptedBackend::Script reference_script(const sketchkit::Repository& reference);

/// A fresh directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& child) const { return path_ / child; }

 private:
  fs::path path_;
};

}  // namespace testsupport
