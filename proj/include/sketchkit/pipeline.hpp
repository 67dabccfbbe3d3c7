#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sketchkit/backend.hpp"
#include "sketchkit/model.hpp"
#include "sketchkit/readme.hpp"
#include "sketchkit/repo_sketch.hpp"

namespace sketchkit {

struct PipelineConfig {
  bool ordered_generation = false;
  SamplingConfig repo_sampling;
  SamplingConfig file_sampling;
  SamplingConfig fill_sampling;
  int repair = 1;                  // re-requests after an invalid response
  bool generate_non_code = false;  // ask stage 2 for non-code files too
  std::size_t concurrency = 1;     // further capped by the backend
};

struct TranscriptEntry {
  Stage stage;
  std::string target;
  std::string request_hash;
  std::string outcome;  // "ok", "invalid: ...", or "backend error: ..."
};

struct GeneratedRepository {
  RepoSketch repo_sketch;
  std::map<std::string, FileSketch> file_sketches;
  std::map<std::pair<std::string, std::string>, std::string> bodies;  // (path, qualified name)
  std::map<std::string, std::string> non_code;                        // path -> verbatim payload
  std::vector<TranscriptEntry> transcript;
  std::vector<std::string> failed;         // "path" or "path::qualified_name"
  std::vector<std::string> dropped_edges;  // "a.py imports b.py"
  std::size_t backend_calls() const { return transcript.size(); }
};

struct TopoResult {
  std::vector<std::string> order;
  std::vector<std::string> dropped_edges;  // "a.py imports b.py"
};

/// Code files with every imported file before its importer. Cycles are
/// cut one edge at a time: in each strongly connected component, the
/// lexicographically greatest dependency loses its greatest dependent.
TopoResult topo_sort(const RepoSketch& sketch);

inline std::vector<std::string> topo_order(const RepoSketch& sketch) { return topo_sort(sketch).order; }

/// Runs the three stages. Throws PipelineAborted when stage 1 fails.
GeneratedRepository run_pipeline(const ReadmeDoc& readme, Backend& backend, const PipelineConfig& config);

struct AssembleReport {
  std::vector<std::string> written;
  std::vector<std::string> failed;
  std::vector<std::string> unparseable;
  std::vector<std::string> skipped_non_code;
  std::filesystem::path manifest;
  /// True when some target failed or some file does not parse.
  bool partial() const { return !failed.empty() || !unparseable.empty(); }
};

/// Default manifest location: `<out_root>.manifest.json`, beside the tree.
std::filesystem::path default_manifest_path(const std::filesystem::path& out_root);

/// Writes the generated tree and its manifest. Throws OutputNotEmpty or IoError.
AssembleReport assemble(const GeneratedRepository& generated, const std::filesystem::path& out_root,
                        const std::filesystem::path& manifest = {});

}  // namespace sketchkit
