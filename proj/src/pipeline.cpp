#include "sketchkit/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <optional>
#include <queue>
#include <set>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "sketchkit/errors.hpp"
#include "sketchkit/extract.hpp"
#include "sketchkit/parallel.hpp"
#include "sketchkit/prompt.hpp"
#include "sketchkit/python/ast.hpp"

namespace fs = std::filesystem;

namespace sketchkit {
namespace {

using Edge = std::pair<std::string, std::string>;  // (first, then)

std::vector<std::vector<std::string>> strongly_connected(const std::set<std::string>& nodes,
                                                         const std::set<Edge>& edges) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [u, v] : edges) adj[u].push_back(v);
  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> out;
  int counter = 0;
  std::function<void(const std::string&)> visit = [&](const std::string& u) {
    index[u] = low[u] = counter++;
    stack.push_back(u);
    on_stack.insert(u);
    for (const std::string& v : adj[u]) {
      if (!index.count(v)) {
        visit(v);
        low[u] = std::min(low[u], low[v]);
      } else if (on_stack.count(v)) {
        low[u] = std::min(low[u], index[v]);
      }
    }
    if (low[u] == index[u]) {
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
      } while (w != u);
      out.push_back(std::move(comp));
    }
  };
  for (const std::string& n : nodes) {
    if (!index.count(n)) visit(n);
  }
  return out;
}

std::string chomp(std::string s) {
  while (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

struct Outcome {
  std::optional<std::string> payload;
  std::vector<TranscriptEntry> log;
};

/// One target: the initial request plus up to `repair` corrective ones.
/// `validate` turns a raw reply into the stored payload or throws.
Outcome request_with_repair(Backend& backend, Stage stage, const std::string& target, const PromptText& base,
                            const SamplingConfig& sampling, int repair,
                            const std::function<std::string(const std::string&)>& validate) {
  Outcome outcome;
  PromptText prompt = base;
  for (int attempt = 0; attempt <= repair; ++attempt) {
    CompletionRequest request{stage, target, prompt.text, sampling};
    std::string hash = request_hash(request);
    CompletionResult result;
    try {
      result = backend.complete(request);
    } catch (const BackendError& e) {
      spdlog::error("{} {}: {}", stage_name(stage), target, e.what());
      outcome.log.push_back({stage, target, hash, std::string("backend error: ") + e.what()});
      return outcome;
    }
    try {
      std::string payload = validate(result.text);
      outcome.log.push_back({stage, target, hash, "ok"});
      outcome.payload = std::move(payload);
      return outcome;
    } catch (const Error& e) {
      spdlog::warn("{} {}: rejected reply ({})", stage_name(stage), target, e.what());
      outcome.log.push_back({stage, target, hash, std::string("invalid: ") + e.what()});
      prompt = render_repair_prompt(base, e.what());
    }
  }
  return outcome;
}

void append(std::vector<TranscriptEntry>& to, std::vector<TranscriptEntry>& from) {
  to.insert(to.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

TopoResult topo_sort(const RepoSketch& sketch) {
  std::vector<std::string> code = sketch.code_paths();
  std::set<std::string> nodes(code.begin(), code.end());
  std::set<Edge> edges;
  for (const std::string& importer : nodes) {
    for (const std::string& dep : sketch.imports_of(importer)) {
      if (dep != importer && nodes.count(dep)) edges.insert({dep, importer});
    }
  }

  TopoResult result;
  while (true) {
    bool cut = false;
    for (const std::vector<std::string>& comp : strongly_connected(nodes, edges)) {
      if (comp.size() < 2) continue;
      std::set<std::string> members(comp.begin(), comp.end());
      std::optional<Edge> victim;
      for (const Edge& e : edges) {
        if (members.count(e.first) && members.count(e.second) && (!victim || e > *victim)) victim = e;
      }
      edges.erase(*victim);
      result.dropped_edges.push_back(victim->second + " imports " + victim->first);
      spdlog::warn("import cycle: ignoring '{} imports {}' for ordering", victim->second, victim->first);
      cut = true;
    }
    if (!cut) break;
  }

  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> adj;
  for (const std::string& n : nodes) indegree[n] = 0;
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    ++indegree[v];
  }
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [n, d] : indegree) {
    if (d == 0) ready.push(n);
  }
  while (!ready.empty()) {
    std::string n = ready.top();
    ready.pop();
    result.order.push_back(n);
    for (const std::string& v : adj[n]) {
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  return result;
}

GeneratedRepository run_pipeline(const ReadmeDoc& readme, Backend& backend, const PipelineConfig& config) {
  if (config.repair < 0) throw DomainError("repair count must be >= 0");
  GeneratedRepository gen;
  std::size_t jobs = std::max<std::size_t>(
      1, std::min<std::size_t>(config.concurrency, static_cast<std::size_t>(std::max(1, backend.max_concurrency()))));

  // Stage 1: repository sketch.
  Outcome stage1 = request_with_repair(
      backend, Stage::RepoSketcher, "<repository>", render_repo_prompt(readme), config.repo_sampling, config.repair,
      [](const std::string& raw) { return parse_response(Stage::RepoSketcher, raw).payload; });
  append(gen.transcript, stage1.log);
  if (!stage1.payload) throw PipelineAborted("no usable repository sketch was generated");
  gen.repo_sketch = parse_repo_sketch(*stage1.payload);
  for (const std::string& d : dangling_imports(gen.repo_sketch)) spdlog::warn("sketch import without a target: {}", d);

  TopoResult topo = topo_sort(gen.repo_sketch);
  gen.dropped_edges = topo.dropped_edges;
  std::vector<std::string> files = config.ordered_generation ? topo.order : gen.repo_sketch.code_paths();
  if (!config.ordered_generation) std::sort(files.begin(), files.end());

  // Stage 2: file sketches.
  std::vector<Outcome> stage2(files.size());
  parallel_for(files.size(), config.ordered_generation ? 1 : jobs, [&](std::size_t i) {
    const std::string& path = files[i];
    stage2[i] = request_with_repair(
        backend, Stage::FileSketcher, path, render_file_prompt(readme, gen.repo_sketch, path), config.file_sampling,
        config.repair, [&](const std::string& raw) {
          return extract_file_sketch(parse_response(Stage::FileSketcher, raw).payload + "\n", path).source;
        });
  });
  for (std::size_t i = 0; i < files.size(); ++i) {
    append(gen.transcript, stage2[i].log);
    if (stage2[i].payload) {
      gen.file_sketches.emplace(files[i], extract_file_sketch(*stage2[i].payload, files[i]));
    } else {
      gen.failed.push_back(files[i]);
    }
  }

  if (config.generate_non_code) {
    std::vector<std::string> others;
    for (const std::string& p : gen.repo_sketch.file_paths()) {
      if (!is_code_path(p)) others.push_back(p);
    }
    std::sort(others.begin(), others.end());
    std::vector<Outcome> outcomes(others.size());
    std::string readme_text = chomp(readme.render());
    std::string sketch_text = render_repo_sketch(gen.repo_sketch);
    parallel_for(others.size(), jobs, [&](std::size_t i) {
      PromptText prompt{Stage::FileSketcher,
                        render_template(templates::file_sketcher, {{"readme", readme_text},
                                                                   {"repo_sketch", sketch_text},
                                                                   {"target_path", others[i]}})};
      outcomes[i] = request_with_repair(backend, Stage::FileSketcher, others[i], prompt, config.file_sampling,
                                        config.repair, [](const std::string& raw) { return unwrap_payload(raw); });
    });
    for (std::size_t i = 0; i < others.size(); ++i) {
      append(gen.transcript, outcomes[i].log);
      if (outcomes[i].payload) {
        gen.non_code.emplace(others[i], *outcomes[i].payload + "\n");
      } else {
        gen.failed.push_back(others[i]);
      }
    }
  }

  // Stage 3: function bodies.
  struct Task {
    const FileSketch* file;
    const FunctionSlot* slot;
    std::vector<FileSketch> relevant;
  };
  std::vector<Task> tasks;
  for (const std::string& path : files) {
    auto it = gen.file_sketches.find(path);
    if (it == gen.file_sketches.end()) continue;
    std::vector<FileSketch> relevant;
    for (const std::string& dep : gen.repo_sketch.imports_of(path)) {
      if (auto d = gen.file_sketches.find(dep); d != gen.file_sketches.end() && dep != path) {
        relevant.push_back(d->second);
      }
    }
    for (const FunctionSlot& slot : it->second.slots) tasks.push_back({&it->second, &slot, relevant});
  }
  std::vector<Outcome> stage3(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    const std::string& name = t.slot->qualified_name;
    stage3[i] = request_with_repair(
        backend, Stage::SketchFiller, t.file->path + "::" + name,
        render_fill_prompt(readme, gen.repo_sketch, t.relevant, *t.file, name), config.fill_sampling, config.repair,
        [&](const std::string& raw) {
          std::string body = parse_response(Stage::SketchFiller, raw).payload;
          try {
            python::parse(splice_function_body(t.file->source, name, body));
          } catch (const SyntaxError& e) {
            throw StagePayloadInvalid(std::string("body does not fit its function: ") + e.what());
          }
          return body;
        });
  });
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    append(gen.transcript, stage3[i].log);
    const Task& t = tasks[i];
    if (stage3[i].payload) {
      gen.bodies[{t.file->path, t.slot->qualified_name}] = *stage3[i].payload;
    } else {
      gen.failed.push_back(t.file->path + "::" + t.slot->qualified_name);
    }
  }
  return gen;
}

fs::path default_manifest_path(const fs::path& out_root) {
  fs::path root = out_root;
  if (!root.has_filename()) root = root.parent_path();
  return root.string() + ".manifest.json";
}

AssembleReport assemble(const GeneratedRepository& generated, const fs::path& out_root, const fs::path& manifest) {
  std::error_code ec;
  if (fs::exists(out_root, ec)) {
    if (!fs::is_directory(out_root, ec)) throw NotADirectory("not a directory: " + out_root.string());
    if (!fs::is_empty(out_root, ec)) throw OutputNotEmpty("output directory is not empty: " + out_root.string());
  }
  fs::create_directories(out_root, ec);
  if (ec) throw IoError("cannot create " + out_root.string() + ": " + ec.message());

  AssembleReport report;
  report.failed = generated.failed;
  report.manifest = manifest.empty() ? default_manifest_path(out_root) : manifest;
  const RepoSketch& sketch = generated.repo_sketch;
  for (const std::string& dir : sketch.dir_paths()) {
    fs::create_directories(out_root / dir, ec);
    if (ec) throw IoError("cannot create " + (out_root / dir).string() + ": " + ec.message());
  }

  for (const std::string& path : sketch.file_paths()) {
    std::string content;
    if (is_code_path(path)) {
      auto it = generated.file_sketches.find(path);
      if (it != generated.file_sketches.end()) {
        std::map<std::string, std::string> bodies;
        for (const FunctionSlot& slot : it->second.slots) {
          auto b = generated.bodies.find({path, slot.qualified_name});
          if (b != generated.bodies.end()) bodies[slot.qualified_name] = b->second;
        }
        try {
          content = splice_bodies(it->second.source, bodies);
        } catch (const Error& e) {
          spdlog::error("{}: cannot splice bodies ({}); writing the sketch", path, e.what());
          content = it->second.source;
          report.unparseable.push_back(path);
        }
        if (!python::parses(content) &&
            std::find(report.unparseable.begin(), report.unparseable.end(), path) == report.unparseable.end()) {
          report.unparseable.push_back(path);
        }
      }
    } else if (auto it = generated.non_code.find(path); it != generated.non_code.end()) {
      content = it->second;
    } else {
      report.skipped_non_code.push_back(path);
    }
    write_file(out_root / path, content);
    report.written.push_back(path);
  }

  nlohmann::ordered_json j;
  j["failed"] = report.failed;
  j["unparseable"] = report.unparseable;
  j["dropped_edges"] = generated.dropped_edges;
  j["skipped_non_code"] = report.skipped_non_code;
  nlohmann::ordered_json calls = nlohmann::ordered_json::array();
  for (const TranscriptEntry& t : generated.transcript) {
    calls.push_back({{"stage", stage_name(t.stage)},
                     {"target", t.target},
                     {"request_hash", t.request_hash},
                     {"outcome", t.outcome}});
  }
  j["transcript"] = calls;
  write_file(report.manifest, j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
  return report;
}

}  // namespace sketchkit
