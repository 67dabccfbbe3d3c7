#include <map>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sketchkit/dataset.hpp"
#include "sketchkit/errors.hpp"
#include "sketchkit/extract.hpp"
#include "sketchkit/pipeline.hpp"
#include "sketchkit/readme.hpp"
#include "sketchkit/repo_sketch.hpp"
#include "sketchkit/repository.hpp"
#include "sketchkit/sketchbleu.hpp"

namespace py = pybind11;
using namespace sketchkit;

namespace {

py::dict slot_dict(const FunctionSlot& s) {
  py::dict d;
  d["qualified_name"] = s.qualified_name;
  d["signature"] = s.signature;
  d["body"] = s.body;
  d["begin"] = s.begin;
  d["end"] = s.end;
  d["has_docstring"] = s.has_docstring;
  return d;
}

py::dict report_dict(const metric::MetricReport& r) {
  py::dict d;
  d["sketchbleu"] = r.composite;
  d["bleu"] = r.bleu;
  d["weighted_bleu"] = r.weighted_bleu;
  d["match_struc"] = r.match_struc;
  d["match_df"] = r.match_df;
  d["tier"] = std::string(tier_name(r.ref_stats.tier));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of sketchkit";

  py::object base = py::reinterpret_borrow<py::object>(PyExc_RuntimeError);
  static py::exception<Error> error(m, "Error", base);
  static py::exception<SyntaxError> syntax_error(m, "SourceSyntaxError", error.ptr());
  static py::exception<SketchParseError> sketch_error(m, "SketchParseError", error.ptr());
  static py::exception<SlotNotFound> slot_error(m, "SlotNotFound", error.ptr());
  static py::exception<DomainError> domain_error(m, "DomainError", error.ptr());
  static py::exception<EmptyRepository> empty_error(m, "EmptyRepository", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SyntaxError& e) {
      py::set_error(syntax_error, e.what());
    } catch (const SketchParseError& e) {
      py::set_error(sketch_error, e.what());
    } catch (const SlotNotFound& e) {
      py::set_error(slot_error, e.what());
    } catch (const DomainError& e) {
      py::set_error(domain_error, e.what());
    } catch (const EmptyRepository& e) {
      py::set_error(empty_error, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("parses", [](std::string_view source) { return python::parses(source); }, py::arg("source"));
  m.def(
      "kind_counts",
      [](std::string source) {
        python::Tree tree = python::parse(std::move(source));
        std::map<std::string, std::size_t> counts;
        python::walk(tree.root(), [&](const python::Node& n) { ++counts[std::string(python::kind_name(n.kind))]; });
        return counts;
      },
      py::arg("source"));

  m.def(
      "kind_sequence",
      [](std::string source) {
        python::Tree tree = python::parse(std::move(source));
        std::vector<std::string> kinds;
        python::walk(tree.root(), [&](const python::Node& n) { kinds.emplace_back(python::kind_name(n.kind)); });
        return kinds;
      },
      py::arg("source"));
  m.def(
      "extract_file_sketch",
      [](std::string_view source, std::string path) {
        FileSketch sketch = extract_file_sketch(source, std::move(path));
        py::list slots;
        for (const FunctionSlot& s : sketch.slots) slots.append(slot_dict(s));
        return py::make_tuple(sketch.source, slots);
      },
      py::arg("source"), py::arg("path") = "");
  m.def("splice_function_body", &splice_function_body, py::arg("sketch"), py::arg("qualified_name"),
        py::arg("body"));
  m.def("canonical_format", &canonical_format, py::arg("source"));

  m.def(
      "normalize_repo_sketch", [](std::string_view text) { return render_repo_sketch(parse_repo_sketch(text)); },
      py::arg("text"));
  m.def(
      "sketch_code_paths", [](std::string_view text) { return parse_repo_sketch(text).code_paths(); },
      py::arg("text"));
  m.def(
      "extract_repo_sketch", [](const std::filesystem::path& root) {
        return render_repo_sketch(extract_repo_sketch(scan_repository(root)));
      },
      py::arg("root"));
  m.def(
      "topo_sort",
      [](std::string_view text) {
        TopoResult r = topo_sort(parse_repo_sketch(text));
        return py::make_tuple(r.order, r.dropped_edges);
      },
      py::arg("sketch"));

  m.def(
      "parse_readme",
      [](std::string_view markdown) {
        ReadmeDoc doc = parse_readme(markdown);
        py::list sections;
        for (const ReadmeSection& s : doc.sections) {
          py::dict d;
          d["heading"] = s.heading;
          d["kind"] = std::string(section_kind_name(s.kind));
          d["retained"] = s.retained;
          sections.append(d);
        }
        py::dict out;
        out["title"] = doc.title;
        out["sections"] = sections;
        out["text"] = doc.render();
        return out;
      },
      py::arg("markdown"));
  m.def(
      "classify_difficulty",
      [](std::size_t files, std::size_t lines) { return std::string(tier_name(classify_difficulty(files, lines))); },
      py::arg("file_count"), py::arg("line_count"));
  m.def(
      "dataset_counts",
      [](const std::filesystem::path& root) {
        InstructionDataset d = build_instruction_dataset(scan_repository(root));
        return py::make_tuple(d.repo_set.size(), d.file_set.size(), d.fill_set.size());
      },
      py::arg("root"));

  m.def(
      "tokenize",
      [](std::string_view source) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const metric::MetricToken& t : metric::tokenize(source)) {
          out.emplace_back(t.text, std::string(metric::token_class_name(t.cls)));
        }
        return out;
      },
      py::arg("source"));
  m.def("brevity_penalty", &metric::brevity_penalty_prime, py::arg("c"), py::arg("r"));
  m.def(
      "max_weight_matching",
      [](const std::vector<std::vector<double>>& weights) {
        metric::Matching match = metric::max_weight_matching(weights);
        return py::make_tuple(match.assignment, match.total);
      },
      py::arg("weights"));
  m.def(
      "dataflow_edges", [](std::string_view source) { return metric::extract_dataflow(source).edges; },
      py::arg("source"));
  m.def(
      "sketchbleu",
      [](const std::filesystem::path& ref, const std::filesystem::path& cand, std::vector<double> weights) {
        if (weights.size() != 4) throw DomainError("expected four weights");
        metric::MetricWeights w{weights[0], weights[1], weights[2], weights[3]};
        return report_dict(metric::sketchbleu(scan_repository(ref), scan_repository(cand), w));
      },
      py::arg("reference"), py::arg("candidate"), py::arg("weights") = std::vector<double>{0.25, 0.25, 0.25, 0.25});
}
