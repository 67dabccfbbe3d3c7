#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "sketchkit/errors.hpp"
#include "sketchkit/extract.hpp"
#include "sketchkit/sketchbleu.hpp"

namespace sketchkit::metric {
namespace {

using python::Kind;
using python::Node;

// Variable name -> definition occurrences that may reach this point.
using State = std::map<std::string, std::set<const Node*>>;

State merge(const State& a, const State& b) {
  State out = a;
  for (const auto& [name, defs] : b) out[name].insert(defs.begin(), defs.end());
  return out;
}

class Analyzer {
 public:
  std::vector<std::pair<std::string, std::string>> edges;

  void function(const Node& fn, State& state) {
    std::size_t args_at = fn.split[0];
    define_parameters(*fn.children[args_at], state);
    block(python::body_of(fn), state);
  }

 private:
  bool emit_ = true;

  void use_name(const std::string& name, const State& state) {
    auto it = state.find(name);
    if (it == state.end() || !emit_) return;
    for (std::size_t k = 0; k < it->second.size(); ++k) edges.emplace_back(name, name);
  }

  void define(const std::string& name, const Node* at, State& state,
              const std::vector<std::string>& sources) {
    if (emit_) {
      for (const std::string& s : sources) edges.emplace_back(name, s);
    }
    state[name] = {at};
  }

  void define_parameters(const Node& arguments, State& state) {
    for (const Node* p : arguments.children) state[p->name] = {p};
  }

  // Local variables read by an expression, for flow edges.
  void sources(const Node& expr, const State& state, std::vector<std::string>& out) {
    if (expr.kind == Kind::Name) {
      if (state.count(expr.name)) out.push_back(expr.name);
      return;
    }
    if (expr.kind == Kind::Lambda) return;
    for (const Node* c : expr.children) sources(*c, state, out);
  }

  void expression(const Node& e, State& state) {
    switch (e.kind) {
      case Kind::Name:
        use_name(e.name, state);
        return;
      case Kind::NamedExpr: {
        expression(*e.children[1], state);
        std::vector<std::string> src;
        sources(*e.children[1], state, src);
        define(e.children[0]->name, e.children[0], state, src);
        return;
      }
      case Kind::Lambda: {
        State inner = state;
        for (const Node* p : e.children[0]->children) {
          for (const Node* d : p->children) expression(*d, state);
        }
        define_parameters(*e.children[0], inner);
        expression(*e.children[1], inner);
        return;
      }
      case Kind::ListComp: case Kind::SetComp: case Kind::GeneratorExp: case Kind::DictComp: {
        State inner = state;
        std::size_t first_gen = e.kind == Kind::DictComp ? 2 : 1;
        for (std::size_t i = first_gen; i < e.children.size(); ++i) {
          const Node& gen = *e.children[i];
          expression(*gen.children[1], inner);
          std::vector<std::string> src;
          sources(*gen.children[1], inner, src);
          target(*gen.children[0], inner, src);
          for (std::size_t k = 2; k < gen.children.size(); ++k) expression(*gen.children[k], inner);
        }
        for (std::size_t i = 0; i < first_gen; ++i) expression(*e.children[i], inner);
        return;
      }
      default:
        for (const Node* c : e.children) expression(*c, state);
    }
  }

  // Binds a store target; attribute and subscript targets read their base.
  void target(const Node& t, State& state, const std::vector<std::string>& src) {
    switch (t.kind) {
      case Kind::Name:
        define(t.name, &t, state, src);
        return;
      case Kind::Tuple: case Kind::List:
        for (const Node* c : t.children) target(*c, state, src);
        return;
      case Kind::Starred:
        target(*t.children[0], state, src);
        return;
      default:
        expression(t, state);
    }
  }

  void pattern(const Node& p, State& state) {
    if ((p.kind == Kind::MatchAs || p.kind == Kind::MatchStar) && !p.name.empty()) {
      define(p.name, &p, state, {});
    }
    if (p.kind == Kind::MatchMapping && !p.asname.empty()) define(p.asname, &p, state, {});
    for (const Node* c : p.children) {
      if (c->kind == Kind::keyword) {
        for (const Node* k : c->children) pattern(*k, state);
      } else if (c->kind >= Kind::MatchValue) {
        pattern(*c, state);
      } else {
        expression(*c, state);
      }
    }
  }

  void block(std::span<const Node* const> stmts, State& state) {
    for (const Node* s : stmts) statement(*s, state);
  }

  void range(const Node& n, std::size_t from, std::size_t to, State& state) {
    block(n.child_range(from, to), state);
  }

  // Runs `body` twice: once silently to find the defs that flow around
  // the back edge, then for real from the merged entry state.
  template <typename Body>
  State loop(const State& entry, Body&& body) {
    bool saved = emit_;
    emit_ = false;
    State first = entry;
    body(first);
    emit_ = saved;
    State second = merge(entry, first);
    body(second);
    return merge(entry, second);
  }

  void statement(const Node& s, State& state) {
    switch (s.kind) {
      case Kind::Assign: {
        const Node& value = *s.children.back();
        expression(value, state);
        std::vector<std::string> src;
        sources(value, state, src);
        for (std::size_t i = 0; i + 1 < s.children.size(); ++i) target(*s.children[i], state, src);
        return;
      }
      case Kind::AugAssign: {
        const Node& tgt = *s.children[0];
        const Node& value = *s.children[2];
        expression(value, state);
        std::vector<std::string> src;
        sources(value, state, src);
        if (tgt.kind == Kind::Name) {
          use_name(tgt.name, state);
          define(tgt.name, &tgt, state, src);
        } else {
          expression(tgt, state);
        }
        return;
      }
      case Kind::AnnAssign: {
        if (s.children.size() < 3) {
          if (s.children[0]->kind != Kind::Name) expression(*s.children[0], state);
          return;
        }
        const Node& value = *s.children[2];
        expression(value, state);
        std::vector<std::string> src;
        sources(value, state, src);
        target(*s.children[0], state, src);
        return;
      }
      case Kind::For: case Kind::AsyncFor: {
        const Node& iter = *s.children[1];
        expression(iter, state);
        std::vector<std::string> src;
        sources(iter, state, src);
        std::size_t orelse = s.split[1];
        state = loop(state, [&](State& st) {
          target(*s.children[0], st, src);
          range(s, 2, orelse, st);
        });
        range(s, orelse, s.children.size(), state);
        return;
      }
      case Kind::While: {
        std::size_t orelse = s.split[1];
        expression(*s.children[0], state);
        state = loop(state, [&](State& st) {
          range(s, 1, orelse, st);
          expression(*s.children[0], st);
        });
        range(s, orelse, s.children.size(), state);
        return;
      }
      case Kind::If: {
        expression(*s.children[0], state);
        std::size_t orelse = s.split[1];
        State then_state = state;
        range(s, 1, orelse, then_state);
        range(s, orelse, s.children.size(), state);
        state = merge(then_state, state);
        return;
      }
      case Kind::With: case Kind::AsyncWith: {
        std::size_t body = s.split[0];
        for (std::size_t i = 0; i < body; ++i) {
          const Node& item = *s.children[i];
          expression(*item.children[0], state);
          if (item.children.size() > 1) {
            std::vector<std::string> src;
            sources(*item.children[0], state, src);
            target(*item.children[1], state, src);
          }
        }
        range(s, body, s.children.size(), state);
        return;
      }
      case Kind::Try: case Kind::TryStar: {
        std::size_t handlers = s.split[0], orelse = s.split[1], final_at = s.split[2];
        State entry = state;
        range(s, 0, handlers, state);
        State after_body = state;
        range(s, orelse, final_at, state);
        State out = state;
        State handler_entry = merge(entry, after_body);
        for (std::size_t i = handlers; i < orelse; ++i) {
          const Node& h = *s.children[i];
          State hs = handler_entry;
          std::size_t body = h.split[0];
          for (std::size_t k = 0; k < body; ++k) expression(*h.children[k], hs);
          if (!h.name.empty()) define(h.name, &h, hs, {});
          range(h, body, h.children.size(), hs);
          out = merge(out, hs);
        }
        range(s, final_at, s.children.size(), out);
        state = std::move(out);
        return;
      }
      case Kind::Match: {
        expression(*s.children[0], state);
        State out = state;
        for (std::size_t i = 1; i < s.children.size(); ++i) {
          const Node& c = *s.children[i];
          State cs = state;
          std::size_t body = c.split[0];
          pattern(*c.children[0], cs);
          for (std::size_t k = 1; k < body; ++k) expression(*c.children[k], cs);
          range(c, body, c.children.size(), cs);
          out = merge(out, cs);
        }
        state = std::move(out);
        return;
      }
      case Kind::Delete:
        for (const Node* t : s.children) {
          expression(*t, state);
          if (t->kind == Kind::Name) state.erase(t->name);
        }
        return;
      case Kind::Import: case Kind::ImportFrom:
        for (const Node* alias : s.children) {
          std::string bound = alias->asname.empty() ? alias->name.substr(0, alias->name.find('.')) : alias->asname;
          if (bound != "*") define(bound, alias, state, {});
        }
        return;
      case Kind::FunctionDef: case Kind::AsyncFunctionDef: {
        std::size_t decorators = s.split[0];
        for (std::size_t i = 0; i < decorators; ++i) expression(*s.children[i], state);
        for (const Node* p : s.children[decorators]->children) {
          std::size_t from = p->split[0];  // skip the annotation
          for (std::size_t k = from; k < p->children.size(); ++k) expression(*p->children[k], state);
        }
        State inner = state;
        function(s, inner);
        define(s.name, &s, state, {});
        return;
      }
      case Kind::ClassDef: {
        for (std::size_t i = 0; i < s.split[1]; ++i) expression(*s.children[i], state);
        State inner = state;
        range(s, s.split[1], s.children.size(), inner);
        define(s.name, &s, state, {});
        return;
      }
      case Kind::Global: case Kind::Nonlocal: case Kind::Pass: case Kind::Break: case Kind::Continue:
        return;
      default:
        for (const Node* c : s.children) expression(*c, state);
    }
  }
};

// Name bound or read by `node` itself, if any.
std::string_view own_name(const Node& node) {
  switch (node.kind) {
    case Kind::Name: case Kind::arg: case Kind::ExceptHandler: case Kind::MatchAs: case Kind::MatchStar:
    case Kind::FunctionDef: case Kind::AsyncFunctionDef: case Kind::ClassDef:
      return node.name;
    case Kind::MatchMapping:
      return node.asname;
    case Kind::alias:
      return node.asname.empty() ? std::string_view(node.name).substr(0, node.name.find('.')) : node.asname;
    default:
      return {};
  }
}

void first_occurrences(const Node& node, std::map<std::string, std::uint32_t>& first, bool root = true) {
  if (std::string_view name = own_name(node); !root && !name.empty()) {
    auto [it, fresh] = first.emplace(std::string(name), node.begin);
    if (!fresh) it->second = std::min(it->second, node.begin);
  }
  for (const Node* c : node.children) first_occurrences(*c, first, false);
}

}  // namespace

DataflowGraph extract_dataflow(const python::Node& fn) {
  if (!python::is_function_def(fn)) throw DomainError("dataflow needs a function definition");
  Analyzer analyzer;
  State state;
  analyzer.function(fn, state);

  std::map<std::string, std::uint32_t> first;
  first_occurrences(fn, first);
  std::set<std::string> used;
  for (const auto& [a, b] : analyzer.edges) {
    used.insert(a);
    used.insert(b);
  }
  std::vector<std::string> order(used.begin(), used.end());
  std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
    std::uint32_t fa = first.count(a) ? first[a] : UINT32_MAX;
    std::uint32_t fb = first.count(b) ? first[b] : UINT32_MAX;
    return fa != fb ? fa < fb : a < b;
  });
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = static_cast<int>(i);

  DataflowGraph graph;
  for (const auto& [a, b] : analyzer.edges) graph.edges.emplace_back(index[a], index[b]);
  std::sort(graph.edges.begin(), graph.edges.end());
  return graph;
}

DataflowGraph extract_dataflow(std::string_view source) {
  python::Tree tree = python::parse(std::string(source));
  std::vector<SlotNode> slots = slot_nodes(tree);
  if (slots.empty()) throw DomainError("no function definition in source");
  return extract_dataflow(*slots.front().node);
}

std::vector<DataflowGraph> repository_dataflow(const Repository& repo) {
  std::vector<DataflowGraph> out;
  for (const RepoFile* f : repo.code_files()) {
    std::optional<python::Tree> tree;
    try {
      tree.emplace(python::parse(f->content));
    } catch (const SyntaxError&) {
      continue;
    }
    for (const SlotNode& slot : slot_nodes(*tree)) out.push_back(extract_dataflow(*slot.node));
  }
  return out;
}

double match_df_function(const DataflowGraph& ref, const DataflowGraph& cand) {
  if (ref.edges.empty() && cand.edges.empty()) return 1.0;
  if (ref.edges.empty() || cand.edges.empty()) return 0.0;
  std::map<std::pair<int, int>, long> rc, cc;
  for (const auto& e : ref.edges) ++rc[e];
  for (const auto& e : cand.edges) ++cc[e];
  long matched = 0;
  for (const auto& [e, k] : cc) {
    auto it = rc.find(e);
    if (it != rc.end()) matched += std::min(k, it->second);
  }
  return static_cast<double>(matched) / static_cast<double>(cand.edges.size());
}

}  // namespace sketchkit::metric
