#include <gtest/gtest.h>

#include "sketchkit/errors.hpp"
#include "sketchkit/extract.hpp"
#include "sketchkit/prompt.hpp"
#include "sketchkit/repository.hpp"
#include "support.hpp"

using namespace sketchkit;

namespace {

std::size_t occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

ReadmeDoc mongo_readme() {
  return parse_readme(testsupport::read_file(testsupport::fixture("repos/mongo_app/README.md")));
}

RepoSketch mongo_sketch() { return parse_repo_sketch("app\n├── settings.py\n└── mongio.py  # imports: settings.py"); }

}  // namespace

TEST(RenderTemplate, SubstitutesOnce) {
  EXPECT_EQ(render_template("a {x} b {y} {unknown}", {{"x", "{y}"}, {"y", "2"}}), "a {y} b 2 {unknown}");
}

TEST(RenderTemplate, OptionalBlocks) {
  std::string tmpl = "start\n{?rel}R: {rel}\n{/rel}end";
  EXPECT_EQ(render_template(tmpl, {{"rel", "x"}}), "start\nR: x\nend");
  EXPECT_EQ(render_template(tmpl, {{"rel", ""}}), "start\nend");
}

TEST(RepoPrompt, ContainsTitleAndIsDeterministic) {
  ReadmeDoc readme = mongo_readme();
  PromptText a = render_repo_prompt(readme);
  EXPECT_EQ(a.stage, Stage::RepoSketcher);
  EXPECT_NE(a.text.find("# mongo_app"), std::string::npos);
  EXPECT_EQ(a.text, render_repo_prompt(readme).text);
  std::string body = readme.render();
  while (!body.empty() && body.back() == '\n') body.pop_back();
  EXPECT_NE(a.text.find(body), std::string::npos);
}

TEST(RepoPrompt, DroppedSectionsAreAbsent) {
  PromptText p = render_repo_prompt(mongo_readme());
  EXPECT_EQ(p.text.find("## FAQ"), std::string::npos);
  EXPECT_EQ(p.text.find("Nothing yet."), std::string::npos);
  EXPECT_EQ(p.text.find("pymongo"), std::string::npos);
}

TEST(FilePrompt, ContainsSketchAndTarget) {
  RepoSketch sketch = mongo_sketch();
  PromptText p = render_file_prompt(mongo_readme(), sketch, "settings.py");
  EXPECT_EQ(p.stage, Stage::FileSketcher);
  EXPECT_NE(p.text.find(render_repo_sketch(sketch)), std::string::npos);
  EXPECT_NE(p.text.find("settings.py"), std::string::npos);
  EXPECT_NE(p.text.find("```\n" + render_repo_sketch(sketch) + "\n```"), std::string::npos);
}

TEST(FilePrompt, UnknownTarget) {
  EXPECT_THROW(render_file_prompt(mongo_readme(), mongo_sketch(), "missing.py"), TargetNotInSketch);
}

TEST(FillPrompt, SecondOfTwoFunctions) {
  FileSketch current = extract_file_sketch("def a():\n    return 1\n\ndef b():\n    return 2\n", "settings.py");
  PromptText p = render_fill_prompt(mongo_readme(), mongo_sketch(), {}, current, "b");
  EXPECT_EQ(occurrences(p.text, kFillPlaceholder), 1u);
  std::string marked = mark_fill_site(current, "b");
  EXPECT_EQ(marked, "def a():\n    pass\n\ndef b():\n    pass  # TODO: implement this function\n");
  EXPECT_NE(p.text.find(marked), std::string::npos);
}

TEST(FillPrompt, RelevantSketchesOnlyWhenPresent) {
  RepoSketch sketch = mongo_sketch();
  FileSketch settings = extract_file_sketch("URI = 'x'\n\ndef uri():\n    return URI\n", "settings.py");
  FileSketch mongio = extract_file_sketch("import settings\n\ndef save():\n    return settings.uri()\n", "mongio.py");
  PromptText without = render_fill_prompt(mongo_readme(), sketch, {}, mongio, "save");
  PromptText with = render_fill_prompt(mongo_readme(), sketch, {settings}, mongio, "save");
  EXPECT_EQ(without.text.find("settings.py:\n```python"), std::string::npos);
  std::size_t rel = with.text.find("settings.py:\n```python\n" + settings.source);
  ASSERT_NE(rel, std::string::npos);
  EXPECT_LT(rel, with.text.find(mark_fill_site(mongio, "save")));
  EXPECT_GT(with.text.size(), without.text.size());
}

TEST(FillPrompt, OnlyFunctionHasNoPlainPass) {
  FileSketch current = extract_file_sketch("def only():\n    return 1\n", "settings.py");
  std::string marked = mark_fill_site(current, "only");
  EXPECT_EQ(marked, "def only():\n    pass  # TODO: implement this function\n");
  PromptText p = render_fill_prompt(mongo_readme(), mongo_sketch(), {}, current, "only");
  EXPECT_EQ(occurrences(p.text, kFillPlaceholder), 1u);
}

TEST(FillPrompt, UnknownTarget) {
  FileSketch current = extract_file_sketch("def a():\n    return 1\n", "settings.py");
  EXPECT_THROW(render_fill_prompt(mongo_readme(), mongo_sketch(), {}, current, "zzz"), TargetNotInSketch);
}

TEST(ParseResponse, RepoSketchWithPrefixAndFence) {
  ModelResponse r = parse_response(Stage::RepoSketcher, "Here is the repository sketch:\n```\napp\n└── main.py\n```");
  EXPECT_EQ(r.payload, "app\n└── main.py");
}

TEST(ParseResponse, BareSketch) {
  std::string raw = "app\n└── main.py";
  EXPECT_EQ(parse_response(Stage::RepoSketcher, raw).payload, raw);
}

TEST(ParseResponse, ProseOnlyIsInvalid) {
  EXPECT_THROW(parse_response(Stage::RepoSketcher, "I am not sure what you mean, sorry about that."),
               StagePayloadInvalid);
  EXPECT_THROW(parse_response(Stage::FileSketcher, "This file defines a few helpers."), StagePayloadInvalid);
  EXPECT_THROW(parse_response(Stage::SketchFiller, "It returns the sum."), StagePayloadInvalid);
}

TEST(ParseResponse, EmptyPayload) {
  EXPECT_THROW(parse_response(Stage::SketchFiller, "Here is the function body:\n```python\n\n```"), EmptyPayload);
  EXPECT_THROW(parse_response(Stage::SketchFiller, "   \n"), EmptyPayload);
}

TEST(ParseResponse, UnmatchedFirstLineIsKept) {
  EXPECT_EQ(parse_response(Stage::SketchFiller, "x = 1\nreturn x").payload, "x = 1\nreturn x");
  EXPECT_EQ(parse_response(Stage::SketchFiller, "The function body:\nreturn 1\n").payload, "return 1");
}

TEST(ParseResponse, FormatIsItsInverse) {
  const std::vector<std::pair<Stage, std::string>> payloads = {
      {Stage::RepoSketcher, "app\n├── pkg\n│   └── a.py\n└── b.py  # imports: pkg/a.py"},
      {Stage::FileSketcher, "import os\n\n\ndef f():\n    pass"},
      {Stage::SketchFiller, "if x:\n    return 1\nreturn 2"},
      {Stage::SketchFiller, "s = '''\n```\n'''\nreturn s"},
  };
  for (const auto& [stage, payload] : payloads) {
    EXPECT_EQ(parse_response(stage, format_response(stage, payload)).payload, payload);
  }
}

TEST(RepairPrompt, AppendsTheError) {
  PromptText base = render_repo_prompt(mongo_readme());
  PromptText repair = render_repair_prompt(base, "line 2: bad connector");
  EXPECT_EQ(repair.stage, base.stage);
  EXPECT_EQ(repair.text.rfind(base.text, 0), 0u);
  EXPECT_NE(repair.text.find("line 2: bad connector"), std::string::npos);
}
