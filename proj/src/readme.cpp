#include "sketchkit/readme.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

namespace sketchkit {
namespace {

struct Line {
  std::size_t begin;
  std::size_t end;  // excludes the line terminator
  std::size_t next;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::size_t next = nl == std::string_view::npos ? text.size() : nl + 1;
    if (end > pos && text[end - 1] == '\r') --end;
    lines.push_back({pos, end, next});
    pos = next;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

std::size_t leading_spaces(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && s[n] == ' ') ++n;
  return n;
}

// Returns the fence marker ("```" or "~~~" run) opening or closing a code block.
std::optional<std::string_view> fence_marker(std::string_view line) {
  std::size_t indent = leading_spaces(line);
  if (indent > 3) return std::nullopt;
  std::string_view rest = line.substr(indent);
  if (rest.empty() || (rest[0] != '`' && rest[0] != '~')) return std::nullopt;
  std::size_t run = 0;
  while (run < rest.size() && rest[run] == rest[0]) ++run;
  if (run < 3) return std::nullopt;
  return rest.substr(0, run);
}

// Level and text of an ATX heading, if `line` is one.
std::optional<std::pair<int, std::string>> atx_heading(std::string_view line) {
  std::size_t indent = leading_spaces(line);
  if (indent > 3) return std::nullopt;
  std::string_view rest = line.substr(indent);
  std::size_t level = 0;
  while (level < rest.size() && rest[level] == '#') ++level;
  if (level == 0 || level > 6) return std::nullopt;
  if (level < rest.size() && rest[level] != ' ' && rest[level] != '\t') return std::nullopt;
  std::string_view text = trim(rest.substr(level));
  while (!text.empty() && text.back() == '#') text.remove_suffix(1);
  return std::make_pair(static_cast<int>(level), std::string(trim(text)));
}

// 1 for '=' underlines, 2 for '-' underlines.
int setext_level(std::string_view line) {
  std::size_t indent = leading_spaces(line);
  if (indent > 3) return 0;
  std::string_view rest = trim(line.substr(indent));
  if (rest.empty()) return 0;
  if (rest.find_first_not_of('=') == std::string_view::npos) return 1;
  if (rest.find_first_not_of('-') == std::string_view::npos) return 2;
  return 0;
}

bool can_be_setext_text(std::string_view line) {
  std::string_view t = trim(line);
  if (t.empty() || atx_heading(line) || fence_marker(line)) return false;
  if (leading_spaces(line) > 3) return false;
  static constexpr std::array<std::string_view, 4> kBlockStarts = {"- ", "* ", "+ ", ">"};
  for (auto p : kBlockStarts) {
    if (t.substr(0, p.size()) == p) return false;
  }
  std::size_t digits = 0;
  while (digits < t.size() && std::isdigit(static_cast<unsigned char>(t[digits]))) ++digits;
  if (digits > 0 && digits < t.size() && (t[digits] == '.' || t[digits] == ')')) return false;
  return true;
}

struct Heading {
  std::size_t offset;
  std::string text;
};

std::vector<Heading> find_headings(std::string_view text, const std::vector<Line>& lines) {
  std::vector<Heading> headings;
  std::optional<std::string> fence;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = text.substr(lines[i].begin, lines[i].end - lines[i].begin);
    if (auto marker = fence_marker(line)) {
      if (!fence) {
        fence = std::string(*marker);
      } else if (marker->front() == fence->front() && marker->size() >= fence->size() &&
                 trim(line).size() == marker->size()) {
        fence.reset();
      }
      continue;
    }
    if (fence) continue;
    if (auto atx = atx_heading(line)) {
      if (atx->first <= 2) headings.push_back({lines[i].begin, atx->second});
      continue;
    }
    if (i + 1 < lines.size() && can_be_setext_text(line)) {
      std::string_view under = text.substr(lines[i + 1].begin, lines[i + 1].end - lines[i + 1].begin);
      if (setext_level(under) > 0) {
        headings.push_back({lines[i].begin, std::string(trim(line))});
        ++i;
      }
    }
  }
  return headings;
}

std::string normalize_heading(std::string_view heading) {
  std::string out;
  bool space = true;
  for (unsigned char c : heading) {
    if (std::isalnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
      space = false;
    } else if (!space) {
      out.push_back(' ');
      space = true;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string first_nonblank_line(std::string_view text) {
  for (const Line& l : split_lines(text)) {
    std::string_view line = trim(text.substr(l.begin, l.end - l.begin));
    if (line.empty()) continue;
    while (!line.empty() && line.front() == '#') line.remove_prefix(1);
    return std::string(trim(line));
  }
  return {};
}

}  // namespace

std::string_view section_kind_name(SectionKind kind) {
  switch (kind) {
    case SectionKind::Description:
      return "description";
    case SectionKind::Features:
      return "features";
    case SectionKind::Installation:
      return "installation";
    case SectionKind::Usage:
      return "usage";
    case SectionKind::Other:
      return "other";
  }
  return "";
}

SectionKind classify_heading(std::string_view heading) {
  struct Rule {
    std::string_view keyword;
    SectionKind kind;
  };
  static constexpr std::array<Rule, 10> kRules = {{
      {"description", SectionKind::Description},
      {"overview", SectionKind::Description},
      {"about", SectionKind::Description},
      {"feature", SectionKind::Features},
      {"install", SectionKind::Installation},
      {"getting started", SectionKind::Installation},
      {"usage", SectionKind::Usage},
      {"example", SectionKind::Usage},
      {"quickstart", SectionKind::Usage},
      {"quick start", SectionKind::Usage},
  }};
  std::string norm = normalize_heading(heading);
  for (const Rule& r : kRules) {
    if (norm.find(r.keyword) != std::string::npos) return r.kind;
  }
  return SectionKind::Other;
}

std::string ReadmeDoc::render() const {
  std::string out;
  for (const ReadmeSection& s : sections) {
    if (s.retained) out += s.text;
  }
  return out;
}

bool ReadmeDoc::empty() const {
  return std::none_of(sections.begin(), sections.end(),
                      [](const ReadmeSection& s) { return s.retained && !is_blank(s.text); });
}

ReadmeDoc parse_readme(std::string_view markdown) {
  ReadmeDoc doc;
  if (markdown.empty()) return doc;
  std::vector<Line> lines = split_lines(markdown);
  std::vector<Heading> headings = find_headings(markdown, lines);

  if (headings.empty()) {
    doc.title = first_nonblank_line(markdown);
    doc.sections.push_back({"", std::string(markdown), SectionKind::Description, true});
    return doc;
  }

  doc.title = headings.front().text;
  std::size_t first = headings.front().offset;
  std::string_view preface = markdown.substr(0, first);
  std::size_t chunk_start = 0;
  if (!is_blank(preface)) {
    doc.sections.push_back({"", std::string(preface), SectionKind::Description, true});
    chunk_start = first;
  }
  for (std::size_t i = 0; i < headings.size(); ++i) {
    std::size_t end = i + 1 < headings.size() ? headings[i + 1].offset : markdown.size();
    std::size_t begin = i == 0 ? chunk_start : headings[i].offset;
    ReadmeSection s;
    s.heading = headings[i].text;
    s.text = std::string(markdown.substr(begin, end - begin));
    s.kind = classify_heading(s.heading);
    if (i == 0) {
      // The first heading titles the document and its chunk leads it.
      if (s.kind == SectionKind::Other) s.kind = SectionKind::Description;
      s.retained = true;
    } else {
      s.retained = s.kind != SectionKind::Other;
    }
    doc.sections.push_back(std::move(s));
  }
  return doc;
}

}  // namespace sketchkit
