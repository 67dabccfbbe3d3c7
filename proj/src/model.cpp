#include "sketchkit/model.hpp"

#include <algorithm>

namespace sketchkit {

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::RepoSketcher:
      return "repo_sketcher";
    case Stage::FileSketcher:
      return "file_sketcher";
    case Stage::SketchFiller:
      return "sketch_filler";
  }
  return "";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : {Stage::RepoSketcher, Stage::FileSketcher, Stage::SketchFiller}) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

const FunctionSlot* FileSketch::find_slot(std::string_view qualified_name) const {
  auto it = std::find_if(slots.begin(), slots.end(), [&](const FunctionSlot& s) {
    return s.qualified_name == qualified_name;
  });
  return it == slots.end() ? nullptr : &*it;
}

std::string_view tier_name(DifficultyTier tier) {
  switch (tier) {
    case DifficultyTier::Easy:
      return "Easy";
    case DifficultyTier::Medium:
      return "Medium";
    case DifficultyTier::Hard:
      return "Hard";
  }
  return "";
}

DifficultyTier classify_difficulty(std::size_t file_count, std::size_t line_count) {
  if (file_count > 10 || line_count > 2500) return DifficultyTier::Hard;
  if (file_count > 5 || line_count > 500) return DifficultyTier::Medium;
  return DifficultyTier::Easy;
}

std::size_t count_lines(std::string_view text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace sketchkit
