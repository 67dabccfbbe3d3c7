#include <algorithm>
#include <optional>
#include <set>

#include <spdlog/spdlog.h>

#include "sketchkit/errors.hpp"
#include "sketchkit/extract.hpp"

namespace sketchkit {
namespace {

using python::Kind;
using python::Node;

std::vector<std::string> split_dotted(std::string_view dotted) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= dotted.size()) {
    std::size_t dot = dotted.find('.', pos);
    std::size_t end = dot == std::string_view::npos ? dotted.size() : dot;
    if (end > pos) parts.emplace_back(dotted.substr(pos, end - pos));
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return parts;
}

std::string join(const std::string& dir, const std::vector<std::string>& parts, std::size_t count) {
  std::string out = dir;
  for (std::size_t i = 0; i < count; ++i) {
    if (!out.empty()) out += '/';
    out += parts[i];
  }
  return out;
}

class Resolver {
 public:
  explicit Resolver(const Repository& repo) {
    for (const RepoFile* f : repo.code_files()) code_.insert(f->path);
  }

  /// `dir/a/b.py` or `dir/a/b/__init__.py`.
  std::optional<std::string> module(const std::string& dir, const std::vector<std::string>& parts,
                                    std::size_t count) const {
    if (count == 0) {
      std::string init = dir.empty() ? "__init__.py" : dir + "/__init__.py";
      if (code_.count(init)) return init;
      return std::nullopt;
    }
    std::string base = join(dir, parts, count);
    if (code_.count(base + ".py")) return base + ".py";
    if (code_.count(base + "/__init__.py")) return base + "/__init__.py";
    return std::nullopt;
  }

  /// Longest resolvable prefix of an absolute dotted name.
  std::optional<std::string> longest(const std::string& dir, const std::vector<std::string>& parts) const {
    for (std::size_t n = parts.size(); n > 0; --n) {
      if (auto hit = module(dir, parts, n)) return hit;
    }
    return std::nullopt;
  }

 private:
  std::set<std::string> code_;
};

std::string parent_dir(std::string_view path) {
  std::size_t slash = path.rfind('/');
  return slash == std::string_view::npos ? std::string() : std::string(path.substr(0, slash));
}

}  // namespace

std::vector<std::string> extract_imports(std::string_view source, const Repository& repo,
                                         std::string_view self_path) {
  python::Tree tree = [&] {
    try {
      return python::parse(std::string(source));
    } catch (const SyntaxError& e) {
      throw e.with_path(std::string(self_path));
    }
  }();
  Resolver resolver(repo);
  std::string own_dir = parent_dir(self_path);
  std::vector<std::string> roots{""};
  if (!own_dir.empty()) roots.push_back(own_dir);

  std::set<std::string> found;
  python::walk(tree.root(), [&](const Node& node) {
    if (node.kind == Kind::Import) {
      for (const Node* alias : node.children) {
        std::vector<std::string> parts = split_dotted(alias->name);
        for (const std::string& root : roots) {
          if (auto hit = resolver.longest(root, parts)) {
            found.insert(*hit);
            break;
          }
        }
      }
    } else if (node.kind == Kind::ImportFrom) {
      std::vector<std::string> parts = split_dotted(node.name);
      std::vector<std::string> bases;
      if (node.flag == 0) {
        bases = roots;
      } else {
        std::string dir = own_dir;
        bool escaped = false;
        for (int up = 1; up < node.flag; ++up) {
          if (dir.empty()) {
            escaped = true;
            break;
          }
          dir = parent_dir(dir);
        }
        if (escaped) return;
        bases.push_back(dir);
      }
      for (const std::string& base : bases) {
        bool any = false;
        for (const Node* alias : node.children) {
          std::vector<std::string> sub = parts;
          sub.push_back(alias->name);
          if (alias->name != "*") {
            if (auto hit = resolver.module(base, sub, sub.size())) {
              found.insert(*hit);
              any = true;
              continue;
            }
          }
          if (auto hit = parts.empty() ? resolver.module(base, parts, 0) : resolver.longest(base, parts)) {
            found.insert(*hit);
            any = true;
          }
        }
        if (any) break;
      }
    }
  });
  found.erase(std::string(self_path));
  return {found.begin(), found.end()};
}

RepoSketch extract_repo_sketch(const Repository& repo, std::vector<std::string>* warnings) {
  RepoSketch sketch;
  sketch.root_name = repo.name;
  for (const RepoFile& f : repo.files) {
    std::vector<std::string> imports;
    if (f.is_code) {
      try {
        imports = extract_imports(f.content, repo, f.path);
      } catch (const SyntaxError& e) {
        std::string msg = std::string(e.what());
        spdlog::warn("{}", msg);
        if (warnings) warnings->push_back(msg);
      }
    }
    insert_sorted(sketch, f.path, std::move(imports));
  }
  return sketch;
}

}  // namespace sketchkit
