#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "sketchkit/model.hpp"
#include "sketchkit/sketchbleu.hpp"

namespace sketchkit::cli {

namespace fs = std::filesystem;

/// Exit codes shared by every command.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kPartial = 2;

/// Writes readme.txt, repo_sketch.txt, sketches/<path> and slots.jsonl.
int cmd_extract(const fs::path& repo_dir, const fs::path& out_dir, std::ostream& log);

/// One instruction dataset per stage across every repository directory
/// directly below `repos_root`, plus summary.txt.
int cmd_dataset(const fs::path& repos_root, const fs::path& out_dir, std::size_t jobs, std::ostream& out);

struct GenerateOptions {
  fs::path readme;
  fs::path out;
  std::string backend;  // "replay:<archive>", "http:<config>" or "http"
  fs::path config;      // used by a bare "http" backend
  fs::path manifest;    // default: <out>.manifest.json
  bool ordered = false;
  bool dry_run = false;
  bool non_code = false;
  int repair = 1;
  std::string sampling = "greedy";  // or "nucleus"
  std::size_t jobs = 1;
};

int cmd_generate(const GenerateOptions& options, std::ostream& out);

struct EvaluateOptions {
  fs::path pred;
  fs::path ref;
  fs::path out;  // optional directory for report.json and report.txt
  metric::MetricWeights weights;
  std::size_t jobs = 1;
};

int cmd_evaluate(const EvaluateOptions& options, std::ostream& out);

// ---- benchmark report ----

struct BenchmarkRow {
  std::string name;
  metric::MetricReport report;
};

struct Aggregate {
  std::size_t count = 0;
  double composite = 0.0;
  double bleu = 0.0;
  double weighted_bleu = 0.0;
  double match_struc = 0.0;
  double match_df = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  std::map<DifficultyTier, Aggregate> tiers;  // present tiers only
  Aggregate overall;
  metric::MetricWeights weights;
};

/// Macro averages per reference tier and overall.
BenchmarkReport make_report(std::vector<BenchmarkRow> rows, const metric::MetricWeights& weights);

std::string report_json(const BenchmarkReport& report);
/// Percentages with two decimals.
std::string report_text(const BenchmarkReport& report);

/// Parses "a,b,c,d". Throws DomainError.
metric::MetricWeights parse_weights(const std::string& text);

/// Entry point of the `sketchkit` executable.
int run(int argc, char** argv);

}  // namespace sketchkit::cli
