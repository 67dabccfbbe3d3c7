#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sketchkit/model.hpp"
#include "sketchkit/python/ast.hpp"
#include "sketchkit/repo_sketch.hpp"
#include "sketchkit/repository.hpp"

namespace sketchkit {

inline constexpr std::string_view kPlaceholder = "pass";
inline constexpr std::string_view kFillPlaceholder = "pass  # TODO: implement this function";

/// A function definition that owns a slot, with its dotted name.
struct SlotNode {
  std::string qualified_name;
  const python::Node* node;
};

/// Top-level functions and methods (classes nested at any depth), found
/// through module- and class-level compound statements but never inside
/// another function. Repeated names get a `#k` suffix (k >= 2).
std::vector<SlotNode> slot_nodes(const python::Tree& tree);

/// Replaces every slot body with `pass`. Throws SyntaxError.
FileSketch extract_file_sketch(std::string_view source, std::string path = {});

/// Replaces the placeholder body of `qualified_name` with `body`.
/// Throws SlotNotFound, IndentationError or SyntaxError.
std::string splice_function_body(std::string_view sketch_source, std::string_view qualified_name,
                                 std::string_view body);

/// Splices several bodies in one pass; keys are qualified names.
std::string splice_bodies(std::string_view sketch_source,
                          const std::map<std::string, std::string>& bodies);

/// Moves a statement block so its first statement sits at `indent`.
/// Lines that begin inside a string literal are left untouched.
/// Throws IndentationError when a statement sits left of the first one.
std::string reindent_block(std::string_view body, std::string_view indent);

inline std::string dedent_block(std::string_view body) { return reindent_block(body, ""); }

/// Whitespace normalization: LF line endings, no trailing whitespace
/// outside string literals, no trailing blank lines, one final newline
/// unless the text is empty.
std::string canonical_format(std::string_view source);

/// Intra-repository import targets of one code file, sorted and unique.
/// Throws SyntaxError carrying `self_path`.
std::vector<std::string> extract_imports(std::string_view source, const Repository& repo,
                                         std::string_view self_path);

/// Directory tree with import annotations. Unparseable files are kept
/// without annotations and reported in `warnings`.
RepoSketch extract_repo_sketch(const Repository& repo, std::vector<std::string>* warnings = nullptr);

}  // namespace sketchkit
