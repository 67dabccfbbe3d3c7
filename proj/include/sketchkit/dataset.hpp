#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sketchkit/model.hpp"
#include "sketchkit/repository.hpp"

namespace sketchkit {

struct InstructionInstance {
  Stage stage;
  std::string repo;
  std::string target;  // repository name, file path, or "path::qualified_name"
  std::string prompt;
  std::string response;
};

struct InstructionDataset {
  std::vector<InstructionInstance> repo_set;
  std::vector<InstructionInstance> file_set;
  std::vector<InstructionInstance> fill_set;
  std::vector<std::string> warnings;  // unparseable files, which are left out
};

/// One repository instance, one per code file, one per function slot.
/// Throws MissingReadme.
InstructionDataset build_instruction_dataset(const Repository& repo);

/// One JSON object per line with fields stage, repo, target, prompt, response.
void write_jsonl(const std::vector<InstructionInstance>& instances, std::ostream& out);

}  // namespace sketchkit
