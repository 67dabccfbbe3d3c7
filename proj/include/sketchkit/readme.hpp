#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sketchkit {

enum class SectionKind { Description, Features, Installation, Usage, Other };

std::string_view section_kind_name(SectionKind kind);

struct ReadmeSection {
  std::string heading;  // heading text without markup; empty for untitled lead text
  std::string text;     // exact source bytes, heading line(s) included
  SectionKind kind = SectionKind::Other;
  bool retained = false;
};

/// A README split into top-level sections. The lead section (title and
/// introduction) is always retained; the rest are kept by heading keyword.
struct ReadmeDoc {
  std::string title;
  std::vector<ReadmeSection> sections;

  /// Concatenated text of the retained sections.
  std::string render() const;
  bool empty() const;
};

ReadmeDoc parse_readme(std::string_view markdown);

/// Keyword classification of one heading.
SectionKind classify_heading(std::string_view heading);

}  // namespace sketchkit
