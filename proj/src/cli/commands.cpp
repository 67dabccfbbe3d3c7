#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "sketchkit/cli.hpp"
#include "sketchkit/dataset.hpp"
#include "sketchkit/errors.hpp"
#include "sketchkit/extract.hpp"
#include "sketchkit/parallel.hpp"
#include "sketchkit/pipeline.hpp"
#include "sketchkit/readme.hpp"
#include "sketchkit/repository.hpp"

namespace sketchkit::cli {
namespace {

void write_text(const fs::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> subdirectories(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw NotADirectory("not a directory: " + root.string());
  std::vector<fs::path> out;
  for (const fs::directory_entry& e : fs::directory_iterator(root)) {
    std::string name = e.path().filename().string();
    if (e.is_directory() && !name.starts_with('.')) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::unique_ptr<Backend> make_backend(const GenerateOptions& options) {
  const std::string& spec = options.backend;
  if (spec.starts_with("replay:")) return std::make_unique<ReplayBackend>(spec.substr(7));
  if (spec.starts_with("http:")) return std::make_unique<HttpBackend>(load_http_config(spec.substr(5)));
  if (spec == "http") {
    if (!options.config.empty()) return std::make_unique<HttpBackend>(load_http_config(options.config));
    HttpConfig config;
    apply_env_overrides(config);
    return std::make_unique<HttpBackend>(config);
  }
  throw BackendError("unknown backend '" + spec + "' (expected replay:<archive>, http:<config> or http)");
}

}  // namespace

int cmd_extract(const fs::path& repo_dir, const fs::path& out_dir, std::ostream& log) {
  try {
    Repository repo = scan_repository(repo_dir);
    std::vector<std::string> warnings;

    std::string readme;
    if (const RepoFile* f = find_readme(repo)) {
      readme = parse_readme(f->content).render();
    } else {
      warnings.push_back("no README found");
    }
    write_text(out_dir / "readme.txt", readme);

    RepoSketch sketch = extract_repo_sketch(repo, &warnings);
    write_text(out_dir / "repo_sketch.txt", render_repo_sketch(sketch) + "\n");

    std::string slots;
    bool partial = false;
    for (const RepoFile* f : repo.code_files()) {
      FileSketch sketch_file;
      try {
        sketch_file = extract_file_sketch(f->content, f->path);
      } catch (const SyntaxError&) {
        partial = true;  // already listed by extract_repo_sketch
        continue;
      }
      write_text(out_dir / "sketches" / f->path, sketch_file.source);
      for (const FunctionSlot& s : sketch_file.slots) {
        nlohmann::ordered_json j{{"file", s.file_path},   {"qualified_name", s.qualified_name},
                                 {"signature", s.signature}, {"body", s.body},
                                 {"begin", s.begin},       {"end", s.end},
                                 {"has_docstring", s.has_docstring}};
        slots += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
      }
    }
    write_text(out_dir / "slots.jsonl", slots);
    for (const std::string& w : warnings) log << "warning: " << w << "\n";
    return partial ? kPartial : kOk;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int cmd_dataset(const fs::path& repos_root, const fs::path& out_dir, std::size_t jobs, std::ostream& out) {
  try {
    std::vector<fs::path> dirs = subdirectories(repos_root);
    if (dirs.empty()) {
      out << "error: no repositories under " << repos_root.string() << "\n";
      return kFailure;
    }
    std::vector<std::optional<InstructionDataset>> results(dirs.size());
    std::vector<std::string> errors(dirs.size());
    parallel_for(dirs.size(), jobs, [&](std::size_t i) {
      try {
        results[i] = build_instruction_dataset(scan_repository(dirs[i]));
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    });

    std::vector<InstructionInstance> repo_set, file_set, fill_set;
    std::ostringstream summary;
    std::size_t repos = 0;
    bool partial = false;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      std::string name = dirs[i].filename().string();
      if (!results[i]) {
        out << "warning: skipping " << name << ": " << errors[i] << "\n";
        partial = true;
        continue;
      }
      InstructionDataset& d = *results[i];
      for (const std::string& w : d.warnings) out << "warning: " << name << ": " << w << "\n";
      partial = partial || !d.warnings.empty();
      summary << name << "\t" << d.repo_set.size() << "\t" << d.file_set.size() << "\t" << d.fill_set.size() << "\n";
      ++repos;
      auto append = [](std::vector<InstructionInstance>& to, const std::vector<InstructionInstance>& from) {
        to.insert(to.end(), from.begin(), from.end());
      };
      append(repo_set, d.repo_set);
      append(file_set, d.file_set);
      append(fill_set, d.fill_set);
    }
    if (repos == 0) {
      out << "error: no usable repositories under " << repos_root.string() << "\n";
      return kFailure;
    }
    summary << "total\t" << repo_set.size() << "\t" << file_set.size() << "\t" << fill_set.size() << "\n";

    fs::create_directories(out_dir);
    for (const auto& [file, set] : {std::make_pair("repo_sketcher.jsonl", &repo_set),
                                    std::make_pair("file_sketcher.jsonl", &file_set),
                                    std::make_pair("sketch_filler.jsonl", &fill_set)}) {
      std::ostringstream ss;
      write_jsonl(*set, ss);
      write_text(out_dir / file, ss.str());
    }
    write_text(out_dir / "summary.txt", summary.str());
    out << summary.str();
    return partial ? kPartial : kOk;
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const fs::filesystem_error& e) {
    out << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int cmd_generate(const GenerateOptions& options, std::ostream& out) {
  try {
    ReadmeDoc readme = parse_readme(read_text(options.readme));
    if (readme.empty()) throw Error("README " + options.readme.string() + " has no usable content");
    std::unique_ptr<Backend> backend = make_backend(options);

    PipelineConfig config;
    config.ordered_generation = options.ordered;
    config.repair = options.repair;
    config.generate_non_code = options.non_code;
    config.concurrency = options.jobs;
    SamplingConfig sampling;
    if (options.sampling == "nucleus") {
      sampling = SamplingConfig::nucleus();
    } else if (options.sampling != "greedy") {
      throw DomainError("unknown sampling mode '" + options.sampling + "'");
    }
    config.repo_sampling = config.file_sampling = config.fill_sampling = sampling;

    GeneratedRepository gen = run_pipeline(readme, *backend, config);
    out << "backend calls: " << gen.backend_calls() << "\n";
    for (const std::string& e : gen.dropped_edges) out << "dropped edge: " << e << "\n";
    for (const std::string& f : gen.failed) out << "failed: " << f << "\n";
    if (options.dry_run) {
      out << render_repo_sketch(gen.repo_sketch) << "\n";
      return gen.failed.empty() ? kOk : kPartial;
    }
    AssembleReport report = assemble(gen, options.out, options.manifest);
    for (const std::string& f : report.unparseable) out << "unparseable: " << f << "\n";
    out << "wrote " << report.written.size() << " files to " << options.out.string() << "\n";
    out << "manifest: " << report.manifest.string() << "\n";
    return report.partial() ? kPartial : kOk;
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const fs::filesystem_error& e) {
    out << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int cmd_evaluate(const EvaluateOptions& options, std::ostream& out) {
  try {
    options.weights.validate();
    std::vector<fs::path> pred = subdirectories(options.pred);
    std::vector<fs::path> ref = subdirectories(options.ref);
    std::set<std::string> pred_names, ref_names;
    for (const fs::path& p : pred) pred_names.insert(p.filename().string());
    for (const fs::path& p : ref) ref_names.insert(p.filename().string());
    if (pred_names != ref_names) {
      out << "error: repository names differ between prediction and reference\n";
      for (const std::string& n : ref_names) {
        if (!pred_names.count(n)) out << "  missing from prediction: " << n << "\n";
      }
      for (const std::string& n : pred_names) {
        if (!ref_names.count(n)) out << "  missing from reference: " << n << "\n";
      }
      return kFailure;
    }
    if (ref.empty()) {
      out << "error: no repositories to evaluate\n";
      return kFailure;
    }
    std::vector<BenchmarkRow> rows(ref.size());
    parallel_for(ref.size(), options.jobs, [&](std::size_t i) {
      std::string name = ref[i].filename().string();
      rows[i].name = name;
      rows[i].report = metric::sketchbleu(scan_repository(ref[i]), scan_repository(options.pred / name),
                                          options.weights);
    });
    BenchmarkReport report = make_report(std::move(rows), options.weights);
    std::string text = report_text(report);
    if (!options.out.empty()) {
      write_text(options.out / "report.json", report_json(report));
      write_text(options.out / "report.txt", text);
    }
    out << text;
    return kOk;
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const fs::filesystem_error& e) {
    out << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace sketchkit::cli
