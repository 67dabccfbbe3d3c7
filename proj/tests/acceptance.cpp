#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <spdlog/spdlog.h>

#include "sketchkit/cli.hpp"
#include "sketchkit/dataset.hpp"
#include "sketchkit/extract.hpp"
#include "sketchkit/pipeline.hpp"
#include "sketchkit/sketchbleu.hpp"
#include "support.hpp"
#include "table_tiers.hpp"

using namespace sketchkit;
using namespace sketchkit::metric;
using testsupport::benchmark_tier_rows;
using testsupport::fixture;
using Big = boost::multiprecision::cpp_dec_float_50;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

const std::vector<std::string> kRepos = {"corpus/alpha", "corpus/beta", "repos/mongo_app", "repos/shapes",
                                         "tiny_todo/reference"};

Outcome identity() {
  auto t0 = Clock::now();
  for (const std::string& name : kRepos) {
    Repository r = scan_repository(fixture(name));
    MetricReport m = sketchbleu(r, r);
    for (double v : {m.composite, m.bleu, m.weighted_bleu, m.match_struc, m.match_df}) {
      if (std::abs(v - 1.0) > 1e-9) return {false, name + " scored " + std::to_string(v)};
    }
  }
  double s = seconds_since(t0);
  return {s < 5.0, std::to_string(kRepos.size()) + " repositories in " + std::to_string(s) + " s"};
}

Outcome brevity() {
  Big e = boost::multiprecision::exp(Big(1));
  struct Case {
    double c, r;
    Big expected;
  };
  std::vector<Case> cases = {{10, 10, Big(1)},
                             {5, 10, Big(1)},
                             {1, (2 * e).convert_to<double>(), Big(1) / 2},
                             {1, 20, 1 / (1 + boost::multiprecision::log(Big(10)))}};
  double worst = 0;
  for (const Case& c : cases) {
    worst = std::max(worst, std::abs(brevity_penalty_prime(c.c, c.r) - c.expected.convert_to<double>()));
  }
  std::ostringstream d;
  d << "max error " << worst;
  return {worst <= 1e-12, d.str()};
}

double exhaustive(const std::vector<std::vector<double>>& w) {
  std::size_t m = w.size(), k = w[0].size();
  std::vector<bool> used(k);
  std::function<double(std::size_t)> go = [&](std::size_t i) -> double {
    if (i == m) return 0.0;
    double best = go(i + 1);
    for (std::size_t j = 0; j < k; ++j) {
      if (used[j]) continue;
      used[j] = true;
      best = std::max(best, w[i][j] + go(i + 1));
      used[j] = false;
    }
    return best;
  };
  return go(0);
}

Outcome matching() {
  auto t0 = Clock::now();
  std::mt19937 rng(20240);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t m = 1 + rng() % 7, k = 1 + rng() % 7;
    std::vector<std::vector<double>> w(m, std::vector<double>(k));
    for (auto& row : w) {
      for (double& x : row) x = u(rng);
    }
    if (std::abs(max_weight_matching(w).total - exhaustive(w)) > 1e-9) {
      return {false, "trial " + std::to_string(trial) + " disagrees"};
    }
  }
  double s = seconds_since(t0);
  return {s < 10.0, "100/100 trials in " + std::to_string(s) + " s"};
}

Outcome difficulty() {
  int hits = 0;
  auto rows = benchmark_tier_rows();
  for (const auto& row : rows) hits += classify_difficulty(row.files, row.lines) == row.tier;
  return {hits == static_cast<int>(rows.size()) && rows.size() == 19,
          std::to_string(hits) + "/" + std::to_string(rows.size()) + " rows"};
}

Outcome dataflow_boundaries() {
  auto g = [](std::vector<std::pair<int, int>> e) { return DataflowGraph{std::move(e)}; };
  std::vector<DataflowGraph> ref = {g({{0, 0}}), g({{0, 0}, {1, 0}}), g({{1, 1}, {2, 1}}), g({{0, 0}, {0, 2}}),
                                    g({{3, 3}}), g({{1, 2}, {4, 4}})};
  double four_two = match_df_graphs({ref.begin(), ref.begin() + 4}, {ref[1], ref[2]});
  double six_one = match_df_graphs(ref, {ref[5]});
  double expected = (1 / (1 + boost::multiprecision::log(Big(3)))).convert_to<double>();
  std::ostringstream d;
  d << "4/2 -> " << four_two << ", 6/1 -> " << six_one;
  return {four_two == 1.0 && std::abs(six_one - expected) <= 1e-9, d.str()};
}

Outcome round_trip() {
  std::size_t total = 0, exact = 0;
  for (const std::string& name : kRepos) {
    Repository ref = scan_repository(fixture(name));
    GeneratedRepository gen;
    gen.repo_sketch = extract_repo_sketch(ref);
    for (const RepoFile* f : ref.code_files()) {
      FileSketch s = extract_file_sketch(f->content, f->path);
      for (const FunctionSlot& slot : s.slots) gen.bodies[{f->path, slot.qualified_name}] = dedent_block(slot.body);
      gen.file_sketches.emplace(f->path, std::move(s));
    }
    testsupport::TempDir dir;
    assemble(gen, dir / "out");
    auto tree = testsupport::read_tree(dir / "out");
    for (const RepoFile* f : ref.code_files()) {
      ++total;
      auto it = tree.find(f->path);
      exact += it != tree.end() && canonical_format(it->second) == canonical_format(f->content);
    }
  }
  return {total > 0 && exact == total, std::to_string(exact) + "/" + std::to_string(total) + " code files"};
}

Outcome cardinality() {
  std::vector<std::string> repos = {"corpus/alpha", "corpus/beta", "repos/mongo_app", "repos/shapes"};
  for (const std::string& name : repos) {
    Repository r = scan_repository(fixture(name));
    std::size_t functions = 0;
    for (const RepoFile* f : r.code_files()) functions += extract_file_sketch(f->content).slots.size();
    InstructionDataset d = build_instruction_dataset(r);
    if (d.repo_set.size() != 1 || d.file_set.size() != r.code_files().size() || d.fill_set.size() != functions) {
      return {false, name + " gave (" + std::to_string(d.repo_set.size()) + ", " + std::to_string(d.file_set.size()) +
                         ", " + std::to_string(d.fill_set.size()) + ")"};
    }
  }
  return {true, std::to_string(repos.size()) + " repositories"};
}

Outcome determinism() {
  testsupport::TempDir dir;
  std::vector<std::map<std::string, std::string>> trees;
  std::size_t calls = 0;
  for (const char* name : {"one", "two"}) {
    cli::GenerateOptions o;
    o.readme = fixture("tiny_todo/README.md");
    o.backend = "replay:" + fixture("tiny_todo/archive.jsonl").string();
    o.out = dir / name;
    std::ostringstream out;
    if (cli::cmd_generate(o, out) != cli::kOk) return {false, "generate failed: " + out.str()};
    trees.push_back(testsupport::read_tree(dir / name));
    std::string text = out.str();
    auto pos = text.find("backend calls: ");
    if (pos != std::string::npos) calls = std::stoul(text.substr(pos + 15));
  }
  Repository ref = scan_repository(fixture("tiny_todo/reference"));
  std::size_t functions = 0;
  for (const RepoFile* f : ref.code_files()) functions += extract_file_sketch(f->content).slots.size();
  std::size_t expected_calls = 1 + ref.code_files().size() + functions;
  bool ok = trees[0] == trees[1] && trees[0] == testsupport::read_tree(fixture("tiny_todo/expected")) &&
            calls == expected_calls;
  return {ok, std::to_string(calls) + " calls, expected " + std::to_string(expected_calls)};
}

RepoSketch sketch_fixture(const std::string& path) {
  std::string text = testsupport::read_file(fixture(path));
  while (!text.empty() && text.back() == '\n') text.pop_back();
  return parse_repo_sketch(text);
}

Outcome topology() {
  RepoSketch chain = sketch_fixture("topo/chain.txt");
  TopoResult r = topo_sort(chain);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < r.order.size(); ++i) pos[r.order[i]] = i;
  std::size_t edges = 0;
  for (const std::string& p : chain.code_paths()) {
    for (const std::string& dep : chain.imports_of(p)) {
      ++edges;
      if (pos.at(dep) > pos.at(p)) return {false, p + " precedes " + dep};
    }
  }
  TopoResult cyc = topo_sort(sketch_fixture("topo/cycle.txt"));
  bool ok = edges == 5 && r.order.size() == 6 && r.dropped_edges.empty() &&
            cyc.order == std::vector<std::string>{"a.py", "b.py"} &&
            cyc.dropped_edges == std::vector<std::string>{"a.py imports b.py"};
  return {ok, std::to_string(edges) + " edges respected; cycle dropped " + std::to_string(cyc.dropped_edges.size())};
}

Outcome sensitivity() {
  auto t0 = Clock::now();
  std::string base = testsupport::read_file(fixture("metric/base.py"));
  std::string renamed = testsupport::read_file(fixture("metric/renamed.py"));
  std::string longer = base;
  longer.insert(longer.rfind("    return"), "    print(\"unused\", -7)\n");
  auto repo = [](const std::string& src) { return make_repository("m", {{"main.py", src, true}}); };
  double same = bleu_prime(repo(base), repo(base));
  double appended = bleu_prime(repo(base), repo(longer));
  double df_same = match_df_repo(repo(base), repo(base));
  double df_renamed = match_df_repo(repo(base), repo(renamed));
  std::ostringstream d;
  d << "bleu " << same << " -> " << appended << ", df " << df_same << " -> " << df_renamed << " ("
    << count_lines(base) << " lines, " << seconds_since(t0) << " s)";
  return {appended < same && df_renamed == df_same && count_lines(base) == 10, d.str()};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::off);
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"identity scoring", identity},
      {"brevity penalty values", brevity},
      {"matching oracle", matching},
      {"difficulty tiers", difficulty},
      {"dataflow match boundaries", dataflow_boundaries},
      {"extraction round trip", round_trip},
      {"dataset cardinality", cardinality},
      {"pipeline determinism", determinism},
      {"topological ordering", topology},
      {"metric sensitivity", sensitivity},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
