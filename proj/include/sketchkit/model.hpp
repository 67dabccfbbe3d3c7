#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sketchkit {

/// The three generation stages, in pipeline order.
enum class Stage { RepoSketcher, FileSketcher, SketchFiller };

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

/// One function of a source file: where its body sits and what it was.
struct FunctionSlot {
  std::string file_path;
  std::string qualified_name;
  std::string signature;
  std::string body;
  std::size_t begin = 0;  // byte span of `body` in the original file
  std::size_t end = 0;
  bool has_docstring = false;

  bool operator==(const FunctionSlot&) const = default;
};

/// A source file whose function bodies are placeholder statements.
struct FileSketch {
  std::string path;
  std::string source;
  std::vector<FunctionSlot> slots;

  const FunctionSlot* find_slot(std::string_view qualified_name) const;
};

enum class DifficultyTier { Easy, Medium, Hard };

std::string_view tier_name(DifficultyTier tier);

DifficultyTier classify_difficulty(std::size_t file_count, std::size_t line_count);

/// Newline-terminated lines in `text`.
std::size_t count_lines(std::string_view text);

}  // namespace sketchkit
