#include "support.hpp"

#include <atomic>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sketchkit/extract.hpp"
#include "sketchkit/prompt.hpp"

namespace testsupport {

fs::path fixtures() { return SKETCHKIT_FIXTURES; }

fs::path fixture(const std::string& relative) { return fixtures() / relative; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  }
  return out;
}

sketchkit::ScriptedBackend::Script reference_script(const sketchkit::Repository& reference) {
  using namespace sketchkit;
  auto answers = std::make_shared<std::map<std::string, std::string>>();
  (*answers)["<repository>"] = render_repo_sketch(extract_repo_sketch(reference));
  for (const RepoFile* f : reference.code_files()) {
    FileSketch sketch = extract_file_sketch(canonical_format(f->content), f->path);
    (*answers)[f->path] = sketch.source;
    for (const FunctionSlot& s : sketch.slots) {
      std::string body = dedent_block(s.body);
      (*answers)[f->path + "::" + s.qualified_name] = body.empty() ? std::string(kPlaceholder) : body;
    }
  }
  return [answers](const CompletionRequest& r) { return format_response(r.stage, answers->at(r.target)); };
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("sketchkit-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

}  // namespace testsupport
