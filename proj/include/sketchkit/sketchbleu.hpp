#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sketchkit/model.hpp"
#include "sketchkit/python/ast.hpp"
#include "sketchkit/repository.hpp"

namespace sketchkit::metric {

// ---- tokens and BLEU ----

enum class TokenClass { Keyword, Identifier, Literal, Operator, Other };

std::string_view token_class_name(TokenClass cls);

struct MetricToken {
  std::string text;
  TokenClass cls;
  bool operator==(const MetricToken&) const = default;
};

using TokenStream = std::vector<MetricToken>;

inline constexpr std::string_view kFileSentinel = "<file>";

/// Lexical tokens without comments or layout. Never throws.
TokenStream tokenize(std::string_view source);

/// Code files in path order, each preceded by a file sentinel token.
TokenStream repository_tokens(const Repository& repo);

/// BP' = 1 when 2c > r, else 1 / (1 + ln r - ln 2c). Throws DomainError
/// unless c > 0 and r > 0.
double brevity_penalty_prime(double c, double r);

/// BLEU' over two token streams: clipped n-gram precisions up to
/// `max_n`, uniform geometric mean, times BP'. With `weighted`, n-grams
/// that start with a keyword count five times.
double bleu_prime_tokens(const TokenStream& ref, const TokenStream& cand, int max_n = 4, bool weighted = false);

/// Throws EmptyRepository unless both sides have a code file.
double bleu_prime(const Repository& ref, const Repository& cand, int max_n = 4);
double weighted_bleu_prime(const Repository& ref, const Repository& cand, int max_n = 4);

// ---- structural tree ----

struct StructNode {
  std::string label;
  std::vector<StructNode> children;
};

inline constexpr std::string_view kRootLabel = "<repository>";
inline constexpr std::string_view kUnparsedLabel = "unparsed";

/// Directories and files (children sorted by name); each code file has
/// one child, its syntax tree of node kinds, or an `unparsed` leaf.
StructNode build_structural_tree(const Repository& repo);

/// Syntax-kind subtree of a parsed module.
StructNode syntax_tree(const python::Tree& tree);

std::size_t node_count(const StructNode& tree);

/// Canonical text of the subtree at `node`, cut below `hops` edges.
std::string serialize_truncated(const StructNode& node, int hops);

/// Clipped multiset precision of the candidate's depth-limited subtrees
/// (one per node) against the reference's.
double match_struc_trees(const StructNode& ref, const StructNode& cand, int hops = 3);
double match_struc(const Repository& ref, const Repository& cand, int hops = 3);

// ---- dataflow ----

/// Def-use edges of one function over normalized variable indices.
struct DataflowGraph {
  std::vector<std::pair<int, int>> edges;  // sorted multiset
  bool operator==(const DataflowGraph&) const = default;
};

DataflowGraph extract_dataflow(const python::Node& function);

/// Parses `source` and analyzes its first function slot. Throws SyntaxError.
DataflowGraph extract_dataflow(std::string_view source);

/// One graph per function slot of every parseable code file, in path order.
std::vector<DataflowGraph> repository_dataflow(const Repository& repo);

/// Clipped edge intersection over the candidate's edge count; both empty
/// gives 1, exactly one empty gives 0.
double match_df_function(const DataflowGraph& ref, const DataflowGraph& cand);

struct Matching {
  std::vector<int> assignment;  // row -> column, or -1
  double total = 0.0;
};

/// Maximum-weight assignment on a rectangular matrix of weights >= 0.
Matching max_weight_matching(const std::vector<std::vector<double>>& weights);

double match_df_graphs(const std::vector<DataflowGraph>& ref, const std::vector<DataflowGraph>& cand);
double match_df_repo(const Repository& ref, const Repository& cand);

// ---- composite ----

struct MetricWeights {
  double alpha = 0.25;
  double beta = 0.25;
  double gamma = 0.25;
  double delta = 0.25;
  /// Throws DomainError unless all are >= 0 and they sum to 1.
  void validate() const;
};

struct RepoStats {
  std::size_t code_files = 0;
  std::size_t lines = 0;
  std::size_t functions = 0;
  std::size_t tokens = 0;
  DifficultyTier tier = DifficultyTier::Easy;
};

RepoStats repo_stats(const Repository& repo);

struct MetricReport {
  double composite = 0.0;
  double bleu = 0.0;
  double weighted_bleu = 0.0;
  double match_struc = 0.0;
  double match_df = 0.0;
  RepoStats ref_stats;
  RepoStats cand_stats;
};

/// Weighted sum of the four sub-scores. Throws EmptyRepository when
/// neither side has a code file.
MetricReport sketchbleu(const Repository& ref, const Repository& cand, const MetricWeights& weights = {});

}  // namespace sketchkit::metric
