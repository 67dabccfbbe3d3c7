#include "sketchkit/dataset.hpp"

#include <map>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "sketchkit/errors.hpp"
#include "sketchkit/extract.hpp"
#include "sketchkit/prompt.hpp"

namespace sketchkit {

InstructionDataset build_instruction_dataset(const Repository& repo) {
  const RepoFile* readme_file = find_readme(repo);
  if (!readme_file) throw MissingReadme(repo.name);
  ReadmeDoc readme = parse_readme(readme_file->content);

  InstructionDataset data;
  RepoSketch sketch = extract_repo_sketch(repo, &data.warnings);
  data.repo_set.push_back({Stage::RepoSketcher, repo.name, repo.name, render_repo_prompt(readme).text,
                           format_response(Stage::RepoSketcher, render_repo_sketch(sketch))});

  std::map<std::string, FileSketch> sketches;
  for (const RepoFile* f : repo.code_files()) {
    try {
      sketches.emplace(f->path, extract_file_sketch(canonical_format(f->content), f->path));
    } catch (const SyntaxError& e) {
      // Already reported by extract_repo_sketch.
      spdlog::debug("skipping {}: {}", f->path, e.what());
    }
  }

  for (const auto& [path, file] : sketches) {
    data.file_set.push_back({Stage::FileSketcher, repo.name, path, render_file_prompt(readme, sketch, path).text,
                             format_response(Stage::FileSketcher, file.source)});
    std::vector<FileSketch> relevant;
    for (const std::string& dep : sketch.imports_of(path)) {
      if (auto it = sketches.find(dep); it != sketches.end()) relevant.push_back(it->second);
    }
    for (const FunctionSlot& slot : file.slots) {
      std::string body = dedent_block(slot.body);
      if (body.empty()) body = kPlaceholder;
      data.fill_set.push_back({Stage::SketchFiller, repo.name, path + "::" + slot.qualified_name,
                               render_fill_prompt(readme, sketch, relevant, file, slot.qualified_name).text,
                               format_response(Stage::SketchFiller, body)});
    }
  }
  return data;
}

void write_jsonl(const std::vector<InstructionInstance>& instances, std::ostream& out) {
  for (const InstructionInstance& inst : instances) {
    nlohmann::ordered_json j;
    j["stage"] = stage_name(inst.stage);
    j["repo"] = inst.repo;
    j["target"] = inst.target;
    j["prompt"] = inst.prompt;
    j["response"] = inst.response;
    out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

}  // namespace sketchkit
