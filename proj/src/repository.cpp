#include "sketchkit/repository.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "sketchkit/errors.hpp"
#include "sketchkit/repo_sketch.hpp"

namespace fs = std::filesystem;

namespace sketchkit {
namespace {

bool ignored(const std::string& segment, const ScanOptions& options) {
  return std::any_of(options.ignore.begin(), options.ignore.end(), [&](const std::string& pat) {
    return fnmatch(pat.c_str(), segment.c_str(), 0) == 0;
  });
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return ss.str();
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

const RepoFile* Repository::find(std::string_view path) const {
  auto it = std::lower_bound(files.begin(), files.end(), path,
                             [](const RepoFile& f, std::string_view p) { return f.path < p; });
  return it != files.end() && it->path == path ? &*it : nullptr;
}

std::vector<const RepoFile*> Repository::code_files() const {
  std::vector<const RepoFile*> out;
  for (const RepoFile& f : files) {
    if (f.is_code) out.push_back(&f);
  }
  return out;
}

bool Repository::operator==(const Repository& other) const {
  if (name != other.name || files.size() != other.files.size()) return false;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (files[i].path != other.files[i].path || files[i].content != other.files[i].content ||
        files[i].is_code != other.files[i].is_code) {
      return false;
    }
  }
  return true;
}

bool is_valid_utf8(std::string_view text) {
  static constexpr std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    std::size_t n;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    }
    if ((c & 0xE0) == 0xC0) {
      n = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      n = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      n = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + n >= text.size()) return false;
    for (std::size_t k = 1; k <= n; ++k) {
      auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (cp < kMin[n] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += n + 1;
  }
  return true;
}

std::string normalize_relative_path(std::string_view path) {
  std::vector<std::string> parts;
  std::string segment;
  auto flush = [&] {
    if (segment.empty() || segment == ".") {
    } else if (segment == "..") {
      if (parts.empty()) throw IoError("path escapes the repository: " + std::string(path));
      parts.pop_back();
    } else {
      parts.push_back(segment);
    }
    segment.clear();
  };
  for (char c : path) {
    if (c == '/' || c == '\\') {
      flush();
    } else {
      segment.push_back(c);
    }
  }
  flush();
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty()) out += '/';
    out += p;
  }
  return out;
}

Repository make_repository(std::string name, std::vector<RepoFile> files) {
  Repository repo;
  repo.name = std::move(name);
  std::set<std::string> seen;
  for (RepoFile& f : files) {
    f.path = normalize_relative_path(f.path);
    if (f.path.empty()) throw IoError("empty file path");
    if (!seen.insert(f.path).second) throw IoError("duplicate file path: " + f.path);
    f.is_code = is_code_path(f.path) && is_valid_utf8(f.content);
  }
  std::sort(files.begin(), files.end(),
            [](const RepoFile& a, const RepoFile& b) { return a.path < b.path; });
  repo.files = std::move(files);
  return repo;
}

Repository scan_repository(const fs::path& root, const ScanOptions& options) {
  std::error_code ec;
  if (!fs::exists(root, ec)) throw IoError("no such directory: " + root.string());
  if (!fs::is_directory(root, ec)) throw NotADirectory("not a directory: " + root.string());

  std::vector<RepoFile> files;
  fs::recursive_directory_iterator it(root, fs::directory_options::none, ec);
  if (ec) throw IoError("cannot list " + root.string() + ": " + ec.message());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) throw IoError("cannot list " + root.string() + ": " + ec.message());
    const fs::directory_entry& entry = *it;
    std::string segment = entry.path().filename().string();
    if (ignored(segment, options)) {
      if (entry.is_directory(ec)) it.disable_recursion_pending();
      continue;
    }
    if (!entry.is_regular_file(ec)) continue;
    RepoFile f;
    f.path = fs::relative(entry.path(), root).generic_string();
    f.content = read_file(entry.path());
    files.push_back(std::move(f));
  }
  fs::path canonical = fs::weakly_canonical(root, ec);
  if (ec) canonical = root;
  std::string name = canonical.filename().string();
  if (name.empty()) name = canonical.parent_path().filename().string();
  if (name.empty()) name = root.string();
  Repository repo = make_repository(std::move(name), std::move(files));
  repo.root_path = root;
  for (const RepoFile& f : repo.files) {
    if (is_code_path(f.path) && !f.is_code) {
      spdlog::warn("{}: not valid UTF-8, treated as a non-code file", f.path);
    }
  }
  return repo;
}

const RepoFile* find_readme(const Repository& repo) {
  for (std::string_view wanted : {"readme.md", "readme.rst", "readme"}) {
    for (const RepoFile& f : repo.files) {
      if (f.path.find('/') == std::string::npos && lower(f.path) == wanted) return &f;
    }
  }
  return nullptr;
}

}  // namespace sketchkit
