#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "sketchkit/cli.hpp"
#include "sketchkit/errors.hpp"
#include "sketchkit/extract.hpp"
#include "sketchkit/sketchbleu.hpp"
#include "support.hpp"

using namespace sketchkit;
using testsupport::fixture;
using testsupport::TempDir;
namespace fs = std::filesystem;

namespace {

int tool(const std::string& args, const fs::path& capture = {}) {
  std::string cmd = std::string(SKETCHKIT_TOOL) + " " + args;
  cmd += capture.empty() ? " > /dev/null 2>&1" : " > '" + capture.string() + "' 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(CliExtract, ArtifactsReassemble) {
  TempDir dir;
  std::ostringstream log;
  ASSERT_EQ(cli::cmd_extract(fixture("repos/shapes"), dir / "x", log), cli::kOk);
  Repository ref = scan_repository(fixture("repos/shapes"));
  EXPECT_EQ(testsupport::read_file(dir / "x/repo_sketch.txt"), render_repo_sketch(extract_repo_sketch(ref)) + "\n");

  std::map<std::string, std::map<std::string, std::string>> bodies;
  std::istringstream slots(testsupport::read_file(dir / "x/slots.jsonl"));
  std::string line;
  while (std::getline(slots, line)) {
    auto j = nlohmann::json::parse(line);
    bodies[j["file"]][j["qualified_name"]] = j["body"];
  }
  for (const RepoFile* f : ref.code_files()) {
    std::string sketch = testsupport::read_file(dir / "x/sketches" / f->path);
    std::map<std::string, std::string> b;
    for (const auto& [name, body] : bodies[f->path]) b[name] = dedent_block(body);
    EXPECT_EQ(canonical_format(splice_bodies(sketch, b)), canonical_format(f->content)) << f->path;
  }
}

TEST(CliExtract, MissingRepository) {
  TempDir dir;
  EXPECT_EQ(tool("extract " + quoted(dir / "nope") + " " + quoted(dir / "out")), 1);
}

TEST(CliDataset, CorpusTotals) {
  TempDir dir;
  std::ostringstream out;
  ASSERT_EQ(cli::cmd_dataset(fixture("corpus"), dir / "d", 2, out), cli::kOk);
  EXPECT_NE(out.str().find("alpha\t1\t3\t12"), std::string::npos);
  EXPECT_NE(out.str().find("beta\t1\t2\t5"), std::string::npos);
  EXPECT_NE(out.str().find("total\t2\t5\t17"), std::string::npos);
  auto count = [&](const std::string& file) {
    std::istringstream in(testsupport::read_file(dir / "d" / file));
    std::size_t n = 0;
    for (std::string l; std::getline(in, l);) n += !l.empty();
    return n;
  };
  EXPECT_EQ(count("repo_sketcher.jsonl"), 2u);
  EXPECT_EQ(count("file_sketcher.jsonl"), 5u);
  EXPECT_EQ(count("sketch_filler.jsonl"), 17u);
}

TEST(CliGenerate, ReplayMatchesGoldenTwice) {
  TempDir dir;
  std::string readme = quoted(fixture("tiny_todo/README.md"));
  std::string backend = "replay:" + fixture("tiny_todo/archive.jsonl").string();
  for (const char* name : {"one", "two"}) {
    EXPECT_EQ(tool("generate --readme " + readme + " --backend '" + backend + "' --out " + quoted(dir / name),
                   dir / (std::string(name) + ".log")),
              0)
        << testsupport::read_file(dir / (std::string(name) + ".log"));
  }
  EXPECT_EQ(testsupport::read_tree(dir / "one"), testsupport::read_tree(fixture("tiny_todo/expected")));
  EXPECT_EQ(testsupport::read_tree(dir / "one"), testsupport::read_tree(dir / "two"));
  EXPECT_NE(testsupport::read_file(dir / "one.log").find("backend calls: 6"), std::string::npos);
}

TEST(CliGenerate, PoisonedArchiveIsPartial) {
  TempDir dir;
  std::string backend = "replay:" + fixture("tiny_todo/poisoned.jsonl").string();
  EXPECT_EQ(tool("generate --readme " + quoted(fixture("tiny_todo/README.md")) + " --backend '" + backend +
                 "' --out " + quoted(dir / "out")),
            2);
  auto manifest = nlohmann::json::parse(testsupport::read_file(dir / "out.manifest.json"));
  ASSERT_TRUE(manifest.contains("failed"));
  EXPECT_EQ(manifest["failed"], nlohmann::json::array({"main.py::main"}));
  EXPECT_NE(testsupport::read_file(dir / "out/main.py").find("pass"), std::string::npos);
}

TEST(CliGenerate, UnknownBackend) {
  TempDir dir;
  EXPECT_EQ(tool("generate --readme " + quoted(fixture("tiny_todo/README.md")) + " --backend bogus --out " +
                 quoted(dir / "out")),
            1);
}

TEST(CliEvaluate, ScoresMatchLibrary) {
  TempDir dir;
  cli::EvaluateOptions o;
  o.pred = fixture("evaluate/pred");
  o.ref = fixture("evaluate/ref");
  o.out = dir / "report";
  o.jobs = 2;
  std::ostringstream out;
  ASSERT_EQ(cli::cmd_evaluate(o, out), cli::kOk) << out.str();
  auto report = nlohmann::json::parse(testsupport::read_file(dir / "report/report.json"));
  ASSERT_EQ(report["repositories"].size(), 3u);
  for (const auto& row : report["repositories"]) {
    std::string name = row["name"];
    metric::MetricReport m = metric::sketchbleu(scan_repository(fixture("evaluate/ref/" + name)),
                                                scan_repository(fixture("evaluate/pred/" + name)));
    EXPECT_NEAR(row["sketchbleu"].get<double>(), m.composite, 1e-12) << name;
    EXPECT_NEAR(row["match_df"].get<double>(), m.match_df, 1e-12) << name;
  }
  EXPECT_NE(out.str().find("alpha"), std::string::npos);
  EXPECT_NE(out.str().find("100.00"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "report/report.txt"));
}

TEST(CliEvaluate, IdenticalTreesScoreFull) {
  TempDir dir;
  EXPECT_EQ(tool("evaluate --pred " + quoted(fixture("evaluate/ref")) + " --ref " + quoted(fixture("evaluate/ref")),
                 dir / "log"),
            0);
  std::string log = testsupport::read_file(dir / "log");
  EXPECT_NE(log.find("overall (3)"), std::string::npos) << log;
  EXPECT_NE(log.find("100.00"), std::string::npos);
}

TEST(CliEvaluate, NameMismatchFails) {
  TempDir dir;
  fs::create_directories(dir / "pred/alpha");
  testsupport::write_file(dir / "pred/alpha/a.py", "x = 1\n");
  std::ostringstream out;
  cli::EvaluateOptions o;
  o.pred = dir / "pred";
  o.ref = fixture("evaluate/ref");
  EXPECT_EQ(cli::cmd_evaluate(o, out), cli::kFailure);
  EXPECT_NE(out.str().find("missing from prediction"), std::string::npos) << out.str();
}

TEST(CliEvaluate, BadWeights) {
  EXPECT_THROW(cli::parse_weights("0.5,0.5"), DomainError);
  EXPECT_THROW(cli::parse_weights("0.5,0.5,0.5,0"), DomainError);
  metric::MetricWeights w = cli::parse_weights("1,0,0,0");
  EXPECT_EQ(w.alpha, 1.0);
  EXPECT_EQ(tool("evaluate --pred " + quoted(fixture("evaluate/pred")) + " --ref " +
                 quoted(fixture("evaluate/ref")) + " --weights 2,0,0,0"),
            1);
}

TEST(CliGlobal, HelpAndUnknownCommand) {
  EXPECT_EQ(tool("--help"), 0);
  EXPECT_NE(tool("frobnicate"), 0);
}
