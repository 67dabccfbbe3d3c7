#include <cmath>

#include "sketchkit/errors.hpp"
#include "sketchkit/extract.hpp"
#include "sketchkit/sketchbleu.hpp"

namespace sketchkit::metric {

double match_df_graphs(const std::vector<DataflowGraph>& ref, const std::vector<DataflowGraph>& cand) {
  if (ref.empty() && cand.empty()) return 1.0;
  if (ref.empty() || cand.empty()) return 0.0;
  std::vector<std::vector<double>> w(ref.size(), std::vector<double>(cand.size()));
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t j = 0; j < cand.size(); ++j) w[i][j] = match_df_function(ref[i], cand[j]);
  }
  double mwbm = max_weight_matching(w).total;
  double nr = static_cast<double>(ref.size());
  double nc = static_cast<double>(cand.size());
  if (nr > nc) return brevity_penalty_prime(nc, nr) * mwbm / nc;
  return brevity_penalty_prime(nr, nc) * mwbm / nr;
}

double match_df_repo(const Repository& ref, const Repository& cand) {
  return match_df_graphs(repository_dataflow(ref), repository_dataflow(cand));
}

void MetricWeights::validate() const {
  for (double w : {alpha, beta, gamma, delta}) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("metric weights must be >= 0");
  }
  if (std::abs(alpha + beta + gamma + delta - 1.0) > 1e-9) throw DomainError("metric weights must sum to 1");
}

RepoStats repo_stats(const Repository& repo) {
  RepoStats stats;
  for (const RepoFile* f : repo.code_files()) {
    ++stats.code_files;
    stats.lines += count_lines(f->content);
    try {
      stats.functions += slot_nodes(python::parse(f->content)).size();
    } catch (const SyntaxError&) {
    }
  }
  stats.tokens = repository_tokens(repo).size();
  stats.tier = classify_difficulty(stats.code_files, stats.lines);
  return stats;
}

MetricReport sketchbleu(const Repository& ref, const Repository& cand, const MetricWeights& weights) {
  weights.validate();
  MetricReport report;
  report.ref_stats = repo_stats(ref);
  report.cand_stats = repo_stats(cand);
  if (report.ref_stats.code_files == 0 && report.cand_stats.code_files == 0) {
    throw EmptyRepository("neither repository has a code file");
  }
  if (report.ref_stats.code_files > 0 && report.cand_stats.code_files > 0) {
    TokenStream r = repository_tokens(ref);
    TokenStream c = repository_tokens(cand);
    report.bleu = bleu_prime_tokens(r, c, 4, false);
    report.weighted_bleu = bleu_prime_tokens(r, c, 4, true);
  }
  report.match_struc = match_struc(ref, cand);
  report.match_df = match_df_repo(ref, cand);
  report.composite = weights.alpha * report.bleu + weights.beta * report.weighted_bleu +
                     weights.gamma * report.match_struc + weights.delta * report.match_df;
  return report;
}

}  // namespace sketchkit::metric
