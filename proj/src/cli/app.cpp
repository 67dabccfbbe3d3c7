#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sketchkit/cli.hpp"
#include "sketchkit/errors.hpp"

namespace sketchkit::cli {

int run(int argc, char** argv) {
  CLI::App app{"Sketch-based repository generation toolkit", "sketchkit"};
  app.require_subcommand(1);

  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string config;
  std::string log_level = "warn";
  app.add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", config, "HTTP backend configuration (JSON)");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  std::string repo, out;
  CLI::App* extract = app.add_subcommand("extract", "Write the sketch layers of one repository");
  extract->add_option("repo", repo, "Repository directory")->required();
  extract->add_option("out", out, "Output directory")->required();

  std::string root;
  CLI::App* dataset = app.add_subcommand("dataset", "Build the three instruction datasets");
  dataset->add_option("root", root, "Directory holding one repository per subdirectory")->required();
  dataset->add_option("out", out, "Output directory")->required();

  GenerateOptions gen;
  std::string gen_readme, gen_out, gen_manifest;
  CLI::App* generate = app.add_subcommand("generate", "Generate a repository from a README");
  generate->add_option("--readme", gen_readme, "README file")->required();
  generate->add_option("--out", gen_out, "Output directory (must be absent or empty)")->required();
  generate->add_option("--backend", gen.backend, "replay:<archive>, http:<config> or http")->required();
  generate->add_option("--manifest", gen_manifest, "Manifest path");
  generate->add_option("--repair", gen.repair, "Re-requests after an invalid response")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--sampling", gen.sampling, "greedy or nucleus")
      ->check(CLI::IsMember({"greedy", "nucleus"}));
  generate->add_flag("--ordered", gen.ordered, "Generate files in import order");
  generate->add_flag("--dry-run", gen.dry_run, "Run the stages without writing files");
  generate->add_flag("--non-code", gen.non_code, "Also generate non-code files");

  EvaluateOptions eval;
  std::string pred, ref, eval_out, weights;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score generated repositories against references");
  evaluate->add_option("--pred", pred, "Directory of generated repositories")->required();
  evaluate->add_option("--ref", ref, "Directory of reference repositories")->required();
  evaluate->add_option("--out", eval_out, "Directory for report.json and report.txt");
  evaluate->add_option("--weights", weights, "alpha,beta,gamma,delta");

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("sketchkit");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (*extract) return cmd_extract(repo, out, std::cerr);
  if (*dataset) return cmd_dataset(root, out, jobs, std::cout);
  if (*generate) {
    gen.readme = gen_readme;
    gen.out = gen_out;
    gen.manifest = gen_manifest;
    gen.config = config;
    gen.jobs = jobs;
    return cmd_generate(gen, std::cout);
  }
  eval.pred = pred;
  eval.ref = ref;
  eval.out = eval_out;
  eval.jobs = jobs;
  if (!weights.empty()) {
    try {
      eval.weights = parse_weights(weights);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kFailure;
    }
  }
  return cmd_evaluate(eval, std::cout);
}

}  // namespace sketchkit::cli
