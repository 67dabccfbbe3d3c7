// Regenerates the replay fixtures of one example directory:
//   <dir>/archive.jsonl   answers reproducing <dir>/reference
//   <dir>/poisoned.jsonl  same, but one fill reply is invalid and its repair is absent
//   <dir>/expected/       the tree `generate` assembles from archive.jsonl
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "sketchkit/backend.hpp"
#include "sketchkit/errors.hpp"
#include "sketchkit/extract.hpp"
#include "sketchkit/pipeline.hpp"
#include "sketchkit/prompt.hpp"
#include "sketchkit/readme.hpp"
#include "sketchkit/repository.hpp"

namespace fs = std::filesystem;
using namespace sketchkit;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Answers {
  std::string repo_sketch;
  std::map<std::string, std::string> file_sketches;
  std::map<std::string, std::string> bodies;  // "path::name"
};

Answers answers_from(const Repository& ref) {
  Answers a;
  a.repo_sketch = render_repo_sketch(extract_repo_sketch(ref));
  for (const RepoFile* f : ref.code_files()) {
    FileSketch sketch = extract_file_sketch(canonical_format(f->content), f->path);
    a.file_sketches[f->path] = sketch.source;
    for (const FunctionSlot& s : sketch.slots) {
      std::string body = dedent_block(s.body);
      a.bodies[f->path + "::" + s.qualified_name] = body.empty() ? std::string(kPlaceholder) : body;
    }
  }
  return a;
}

std::string answer(const Answers& a, const CompletionRequest& r) {
  switch (r.stage) {
    case Stage::RepoSketcher:
      return format_response(r.stage, a.repo_sketch);
    case Stage::FileSketcher:
      return format_response(r.stage, a.file_sketches.at(r.target));
    case Stage::SketchFiller:
      return format_response(r.stage, a.bodies.at(r.target));
  }
  return {};
}

GeneratedRepository record_run(const ReadmeDoc& readme, Backend& inner, const fs::path& archive) {
  fs::remove(archive);
  RecordingBackend recorder(inner, archive);
  return run_pipeline(readme, recorder, PipelineConfig{});
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_replay_fixture <example-dir>\n";
    return 1;
  }
  try {
    fs::path dir = argv[1];
    ReadmeDoc readme = parse_readme(read_text(dir / "README.md"));
    Answers a = answers_from(scan_repository(dir / "reference"));

    ScriptedBackend faithful([&](const CompletionRequest& r) { return answer(a, r); });
    GeneratedRepository gen = record_run(readme, faithful, dir / "archive.jsonl");

    const std::string poisoned_target = a.bodies.begin()->first;
    std::mutex mutex;
    std::set<std::string> seen;
    ScriptedBackend poisoned([&](const CompletionRequest& r) {
      if (r.target != poisoned_target) return answer(a, r);
      std::lock_guard lock(mutex);
      if (!seen.insert(r.target).second) throw BackendError("repair not recorded");
      return format_response(r.stage, "return (");
    });
    record_run(readme, poisoned, dir / "poisoned.jsonl");

    fs::remove_all(dir / "expected");
    fs::path manifest = fs::temp_directory_path() / "make_replay_fixture.manifest.json";
    AssembleReport report = assemble(gen, dir / "expected", manifest);
    fs::remove(manifest);
    std::cout << "recorded " << gen.backend_calls() << " calls; poisoned " << poisoned_target << "; wrote "
              << report.written.size() << " files\n";
    return report.partial() ? 2 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
