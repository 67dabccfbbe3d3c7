#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sketchkit/model.hpp"
#include "sketchkit/readme.hpp"
#include "sketchkit/repo_sketch.hpp"

namespace sketchkit {

namespace templates {
extern const std::string_view repo_sketcher;
extern const std::string_view file_sketcher;
extern const std::string_view sketch_filler;
extern const std::string_view repair;
}  // namespace templates

struct PromptText {
  Stage stage;
  std::string text;
};

struct ModelResponse {
  std::string raw;
  std::string payload;
};

/// Substitutes `{name}` placeholders in one pass; `{?name}...{/name}`
/// blocks are dropped when `name` maps to an empty value. Unknown
/// placeholders are kept verbatim.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

std::string_view stage_template(Stage stage);

PromptText render_repo_prompt(const ReadmeDoc& readme);

/// Throws TargetNotInSketch unless `target_path` is a code file of the sketch.
PromptText render_file_prompt(const ReadmeDoc& readme, const RepoSketch& sketch,
                              std::string_view target_path);

/// `relevant` must be the sketches of the files imported by `current`, in
/// annotation order. Throws TargetNotInSketch when `target` has no slot.
PromptText render_fill_prompt(const ReadmeDoc& readme, const RepoSketch& sketch,
                              const std::vector<FileSketch>& relevant, const FileSketch& current,
                              std::string_view target);

/// The current sketch as shown to the filler: the target body becomes
/// the fill-site placeholder and every other body becomes `pass`.
std::string mark_fill_site(const FileSketch& current, std::string_view target);

/// Appends the repair instructions and the rejection reason.
PromptText render_repair_prompt(const PromptText& original, std::string_view error);

/// The raw payload: response-type line and code fence removed, no validation.
/// Throws EmptyPayload.
std::string unwrap_payload(std::string_view raw);

/// Strips the response-type line and code fence, then validates the
/// payload for `stage`. Throws EmptyPayload or StagePayloadInvalid.
ModelResponse parse_response(Stage stage, std::string_view raw);

/// The inverse of parse_response: a response-type line plus a fenced payload.
std::string format_response(Stage stage, std::string_view payload);

}  // namespace sketchkit
