#include <algorithm>
#include <functional>
#include <map>

#include "sketchkit/errors.hpp"
#include "sketchkit/sketchbleu.hpp"

namespace sketchkit::metric {
namespace {

StructNode convert(const python::Node& node) {
  StructNode out{std::string(python::kind_name(node.kind)), {}};
  out.children.reserve(node.children.size());
  for (const python::Node* child : node.children) out.children.push_back(convert(*child));
  return out;
}

/// Interns depth-limited subtrees so equal shapes share one id.
class Interner {
 public:
  int id(const std::string& label, std::vector<int> children) {
    auto [it, fresh] = table_.emplace(std::make_pair(label, std::move(children)), static_cast<int>(table_.size()));
    return it->second;
  }

 private:
  std::map<std::pair<std::string, std::vector<int>>, int> table_;
};

/// ids[d] is the id of the subtree at `node` cut below depth d; every
/// node contributes ids[hops] to `out`.
std::vector<int> collect(const StructNode& node, int hops, Interner& interner, std::map<int, long>& out) {
  std::vector<std::vector<int>> child_ids;
  child_ids.reserve(node.children.size());
  for (const StructNode& c : node.children) child_ids.push_back(collect(c, hops, interner, out));
  std::vector<int> ids(hops + 1);
  ids[0] = interner.id(node.label, {});
  for (int d = 1; d <= hops; ++d) {
    std::vector<int> kids;
    kids.reserve(child_ids.size());
    for (const std::vector<int>& c : child_ids) kids.push_back(c[d - 1]);
    ids[d] = node.children.empty() ? ids[0] : interner.id(node.label, std::move(kids));
  }
  ++out[ids[hops]];
  return ids;
}

}  // namespace

StructNode syntax_tree(const python::Tree& tree) { return convert(tree.root()); }

StructNode build_structural_tree(const Repository& repo) {
  StructNode root{std::string(kRootLabel), {}};
  struct Builder {
    std::map<std::string, Builder> dirs;
    std::map<std::string, StructNode> files;
  } top;
  for (const RepoFile& f : repo.files) {
    Builder* level = &top;
    std::size_t pos = 0;
    while (true) {
      std::size_t slash = f.path.find('/', pos);
      if (slash == std::string::npos) break;
      std::string dir = f.path.substr(pos, slash - pos);
      level = &level->dirs[dir];
      pos = slash + 1;
    }
    std::string name = f.path.substr(pos);
    StructNode file{name, {}};
    if (f.is_code) {
      try {
        file.children.push_back(syntax_tree(python::parse(f.content)));
      } catch (const SyntaxError&) {
        file.children.push_back({std::string(kUnparsedLabel), {}});
      }
    }
    level->files.emplace(name, std::move(file));
  }
  std::function<void(const Builder&, StructNode&)> emit = [&](const Builder& b, StructNode& out) {
    std::vector<std::pair<std::string, StructNode>> entries;
    for (const auto& [name, sub] : b.dirs) {
      StructNode dir{name, {}};
      emit(sub, dir);
      entries.emplace_back(name, std::move(dir));
    }
    for (const auto& [name, file] : b.files) entries.emplace_back(name, file);
    std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& e : entries) out.children.push_back(std::move(e.second));
  };
  emit(top, root);
  return root;
}

std::size_t node_count(const StructNode& tree) {
  std::size_t n = 1;
  for (const StructNode& c : tree.children) n += node_count(c);
  return n;
}

std::string serialize_truncated(const StructNode& node, int hops) {
  std::string out = node.label;
  if (hops > 0 && !node.children.empty()) {
    out += '(';
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (i) out += ',';
      out += serialize_truncated(node.children[i], hops - 1);
    }
    out += ')';
  }
  return out;
}

double match_struc_trees(const StructNode& ref, const StructNode& cand, int hops) {
  if (hops < 0) throw DomainError("hop count must be >= 0");
  bool ref_empty = ref.children.empty();
  bool cand_empty = cand.children.empty();
  if (ref_empty && cand_empty) return 1.0;
  if (cand_empty) return 0.0;
  Interner interner;
  std::map<int, long> rc, cc;
  collect(ref, hops, interner, rc);
  collect(cand, hops, interner, cc);
  long matched = 0;
  long total = 0;
  for (const auto& [id, k] : cc) {
    auto it = rc.find(id);
    matched += it == rc.end() ? 0 : std::min(k, it->second);
    total += k;
  }
  return static_cast<double>(matched) / static_cast<double>(total);
}

double match_struc(const Repository& ref, const Repository& cand, int hops) {
  return match_struc_trees(build_structural_tree(ref), build_structural_tree(cand), hops);
}

}  // namespace sketchkit::metric
