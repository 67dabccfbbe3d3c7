#include "sketchkit/prompt.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

#include "sketchkit/errors.hpp"
#include "sketchkit/extract.hpp"
#include "sketchkit/python/ast.hpp"

namespace sketchkit {
namespace {

std::string chomp(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

struct Fence {
  char ch = 0;
  std::size_t len = 0;
};

// An opening fence: three or more backticks or tildes.
std::optional<Fence> open_fence(std::string_view line) {
  std::string_view t = trim(line);
  if (t.empty() || (t[0] != '`' && t[0] != '~')) return std::nullopt;
  std::size_t n = t.find_first_not_of(t[0]);
  n = n == std::string_view::npos ? t.size() : n;
  if (n < 3) return std::nullopt;
  return Fence{t[0], n};
}

bool closes(std::string_view line, const Fence& fence) {
  std::string_view t = trim(line);
  return t.size() >= fence.len && t.find_first_not_of(fence.ch) == std::string_view::npos;
}

bool is_fence(std::string_view line) { return open_fence(line).has_value(); }

// Longer than any backtick run that starts a payload line.
std::string fence_for(std::string_view payload) {
  std::size_t longest = 0;
  for (std::string_view line : split_lines(payload)) {
    std::string_view t = trim(line);
    std::size_t n = t.find_first_not_of('`');
    longest = std::max(longest, n == std::string_view::npos ? t.size() : n);
  }
  return std::string(std::max<std::size_t>(3, longest + 1), '`');
}

bool is_response_type_line(std::string_view line) {
  static constexpr std::array<std::string_view, 4> kPatterns = {
      "here is", "the repository sketch", "the file sketch", "the function body"};
  std::string l = lower(trim(line));
  return std::any_of(kPatterns.begin(), kPatterns.end(),
                     [&](std::string_view p) { return l.starts_with(p); });
}

std::string_view response_prefix(Stage stage) {
  switch (stage) {
    case Stage::RepoSketcher:
      return "Here is the repository sketch:";
    case Stage::FileSketcher:
      return "Here is the file sketch:";
    case Stage::SketchFiller:
      return "Here is the function body:";
  }
  return "";
}

std::string_view fence_language(Stage stage) { return stage == Stage::RepoSketcher ? "" : "python"; }

std::string readme_text(const ReadmeDoc& readme) { return chomp(readme.render()); }

std::string fenced(std::string_view path, std::string_view source) {
  return std::string(path) + ":\n```python\n" + chomp(source) + "\n```\n";
}

}  // namespace

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    std::size_t close = tmpl.find('}', open);
    if (close == std::string_view::npos) {
      out.append(tmpl.substr(open));
      break;
    }
    std::string_view tag = tmpl.substr(open + 1, close - open - 1);
    if (tag.starts_with('?')) {
      std::string name(tag.substr(1));
      std::string end_tag = "{/" + name + "}";
      std::size_t end = tmpl.find(end_tag, close);
      auto it = values.find(name);
      if (end != std::string_view::npos && it != values.end()) {
        if (!it->second.empty()) out += render_template(tmpl.substr(close + 1, end - close - 1), values);
        pos = end + end_tag.size();
        // The block owns the line break that follows its end tag.
        if (it->second.empty() && pos < tmpl.size() && tmpl[pos] == '\n') ++pos;
        continue;
      }
    } else if (auto it = values.find(std::string(tag)); it != values.end()) {
      out += it->second;
      pos = close + 1;
      continue;
    }
    out.append(tmpl.substr(open, close + 1 - open));
    pos = close + 1;
  }
  return out;
}

std::string_view stage_template(Stage stage) {
  switch (stage) {
    case Stage::RepoSketcher:
      return templates::repo_sketcher;
    case Stage::FileSketcher:
      return templates::file_sketcher;
    case Stage::SketchFiller:
      return templates::sketch_filler;
  }
  return {};
}

PromptText render_repo_prompt(const ReadmeDoc& readme) {
  return {Stage::RepoSketcher, render_template(templates::repo_sketcher, {{"readme", readme_text(readme)}})};
}

PromptText render_file_prompt(const ReadmeDoc& readme, const RepoSketch& sketch, std::string_view target_path) {
  const SketchEntry* entry = sketch.find(target_path);
  if (!entry || entry->is_dir || !is_code_path(target_path)) throw TargetNotInSketch(std::string(target_path));
  return {Stage::FileSketcher, render_template(templates::file_sketcher, {{"readme", readme_text(readme)},
                                                                          {"repo_sketch", render_repo_sketch(sketch)},
                                                                          {"target_path", std::string(target_path)}})};
}

std::string mark_fill_site(const FileSketch& current, std::string_view target) {
  FileSketch fresh = extract_file_sketch(current.source, current.path);
  if (!fresh.find_slot(target)) throw TargetNotInSketch(current.path + "::" + std::string(target));
  std::map<std::string, std::string> bodies;
  for (const FunctionSlot& slot : fresh.slots) {
    bodies[slot.qualified_name] = std::string(slot.qualified_name == target ? kFillPlaceholder : kPlaceholder);
  }
  return splice_bodies(fresh.source, bodies);
}

PromptText render_fill_prompt(const ReadmeDoc& readme, const RepoSketch& sketch,
                              const std::vector<FileSketch>& relevant, const FileSketch& current,
                              std::string_view target) {
  std::string marked = mark_fill_site(current, target);
  std::string related;
  for (const FileSketch& fs : relevant) {
    if (!related.empty()) related += '\n';
    related += fenced(fs.path, fs.source);
  }
  return {Stage::SketchFiller,
          render_template(templates::sketch_filler, {{"readme", readme_text(readme)},
                                                     {"repo_sketch", render_repo_sketch(sketch)},
                                                     {"relevant_sketches", chomp(related)},
                                                     {"current_sketch", chomp(marked)},
                                                     {"target_path", current.path},
                                                     {"target_function", std::string(target)}})};
}

PromptText render_repair_prompt(const PromptText& original, std::string_view error) {
  return {original.stage, original.text + render_template(templates::repair, {{"error", std::string(error)}})};
}

std::string unwrap_payload(std::string_view raw) {
  std::string text;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\r') {
      text += '\n';
      if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
    } else {
      text += raw[i];
    }
  }
  std::vector<std::string_view> lines = split_lines(text);
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw EmptyPayload();
  if (!is_fence(lines[first]) && is_response_type_line(lines[first])) ++first;

  std::size_t begin = first;
  std::size_t end = lines.size();
  for (std::size_t i = first; i < lines.size(); ++i) {
    std::optional<Fence> fence = open_fence(lines[i]);
    if (!fence) continue;
    begin = i + 1;
    for (std::size_t j = begin; j < lines.size(); ++j) {
      if (closes(lines[j], *fence)) {
        end = j;
        break;
      }
    }
    break;
  }
  while (begin < end && trim(lines[begin]).empty()) ++begin;
  while (end > begin && trim(lines[end - 1]).empty()) --end;
  if (begin == end) throw EmptyPayload();

  std::string payload;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) payload += '\n';
    payload += lines[i];
  }
  return payload;
}

ModelResponse parse_response(Stage stage, std::string_view raw) {
  ModelResponse response;
  response.raw = std::string(raw);
  std::string payload = unwrap_payload(raw);

  switch (stage) {
    case Stage::RepoSketcher: {
      RepoSketch sketch;
      try {
        sketch = parse_repo_sketch(payload);
      } catch (const SketchParseError& e) {
        throw StagePayloadInvalid(std::string("invalid repository sketch: ") + e.what());
      }
      if (sketch.entries.empty()) throw StagePayloadInvalid("invalid repository sketch: no entries");
      break;
    }
    case Stage::FileSketcher:
      try {
        python::parse(payload + "\n");
      } catch (const SyntaxError& e) {
        throw StagePayloadInvalid(std::string("invalid file sketch: ") + e.what());
      }
      break;
    case Stage::SketchFiller:
      try {
        python::parse("def _():\n" + reindent_block(payload, "    ") + "\n");
      } catch (const SyntaxError& e) {
        throw StagePayloadInvalid(std::string("invalid function body: ") + e.what());
      } catch (const IndentationError& e) {
        throw StagePayloadInvalid(std::string("invalid function body: ") + e.what());
      }
      break;
  }
  response.payload = std::move(payload);
  return response;
}

std::string format_response(Stage stage, std::string_view payload) {
  std::string fence = fence_for(payload);
  std::string out(response_prefix(stage));
  out += "\n" + fence;
  out += fence_language(stage);
  out += '\n';
  out += chomp(payload);
  out += "\n" + fence + "\n";
  return out;
}

}  // namespace sketchkit
