#include <cctype>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "sketchkit/cli.hpp"
#include "sketchkit/errors.hpp"

namespace sketchkit::cli {
namespace {

void add(Aggregate& agg, const metric::MetricReport& r) {
  ++agg.count;
  agg.composite += r.composite;
  agg.bleu += r.bleu;
  agg.weighted_bleu += r.weighted_bleu;
  agg.match_struc += r.match_struc;
  agg.match_df += r.match_df;
}

void finish(Aggregate& agg) {
  if (agg.count == 0) return;
  double n = static_cast<double>(agg.count);
  agg.composite /= n;
  agg.bleu /= n;
  agg.weighted_bleu /= n;
  agg.match_struc /= n;
  agg.match_df /= n;
}

nlohmann::ordered_json scores(double composite, double bleu, double weighted, double struc, double df) {
  return {{"sketchbleu", composite}, {"bleu", bleu}, {"weighted_bleu", weighted}, {"match_struc", struc},
          {"match_df", df}};
}

nlohmann::ordered_json aggregate_json(const Aggregate& a) {
  nlohmann::ordered_json j{{"count", a.count}};
  j.update(scores(a.composite, a.bleu, a.weighted_bleu, a.match_struc, a.match_df));
  return j;
}

nlohmann::ordered_json stats_json(const metric::RepoStats& s) {
  return {{"code_files", s.code_files}, {"lines", s.lines},  {"functions", s.functions},
          {"tokens", s.tokens},         {"tier", tier_name(s.tier)}};
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
  return buf;
}

std::string row(std::string_view name, std::string_view tier, double composite, double bleu, double weighted,
                double struc, double df) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24.*s %-7.*s %10s %8s %10s %8s %8s\n", static_cast<int>(name.size()),
                name.data(), static_cast<int>(tier.size()), tier.data(), pct(composite).c_str(), pct(bleu).c_str(),
                pct(weighted).c_str(), pct(struc).c_str(), pct(df).c_str());
  return buf;
}

}  // namespace

BenchmarkReport make_report(std::vector<BenchmarkRow> rows, const metric::MetricWeights& weights) {
  BenchmarkReport report;
  report.rows = std::move(rows);
  report.weights = weights;
  for (const BenchmarkRow& r : report.rows) {
    add(report.tiers[r.report.ref_stats.tier], r.report);
    add(report.overall, r.report);
  }
  for (auto& [tier, agg] : report.tiers) finish(agg);
  finish(report.overall);
  return report;
}

std::string report_json(const BenchmarkReport& report) {
  nlohmann::ordered_json j;
  j["weights"] = {{"alpha", report.weights.alpha},
                  {"beta", report.weights.beta},
                  {"gamma", report.weights.gamma},
                  {"delta", report.weights.delta}};
  j["repositories"] = nlohmann::ordered_json::array();
  for (const BenchmarkRow& r : report.rows) {
    nlohmann::ordered_json e{{"name", r.name}, {"tier", tier_name(r.report.ref_stats.tier)}};
    e.update(scores(r.report.composite, r.report.bleu, r.report.weighted_bleu, r.report.match_struc,
                    r.report.match_df));
    e["reference"] = stats_json(r.report.ref_stats);
    e["prediction"] = stats_json(r.report.cand_stats);
    j["repositories"].push_back(std::move(e));
  }
  j["tiers"] = nlohmann::ordered_json::object();
  for (const auto& [tier, agg] : report.tiers) j["tiers"][std::string(tier_name(tier))] = aggregate_json(agg);
  j["overall"] = aggregate_json(report.overall);
  return j.dump(2) + "\n";
}

std::string report_text(const BenchmarkReport& report) {
  std::ostringstream out;
  char head[256];
  std::snprintf(head, sizeof head, "%-24s %-7s %10s %8s %10s %8s %8s\n", "repository", "tier", "SketchBLEU", "BLEU'",
                "wBLEU'", "struc", "df");
  out << head;
  for (const BenchmarkRow& r : report.rows) {
    const metric::MetricReport& m = r.report;
    out << row(r.name, tier_name(m.ref_stats.tier), m.composite, m.bleu, m.weighted_bleu, m.match_struc, m.match_df);
  }
  out << "\n";
  for (const auto& [tier, a] : report.tiers) {
    out << row(std::string(tier_name(tier)) + " (" + std::to_string(a.count) + ")", "", a.composite, a.bleu,
               a.weighted_bleu, a.match_struc, a.match_df);
  }
  const Aggregate& a = report.overall;
  out << row("overall (" + std::to_string(a.count) + ")", "", a.composite, a.bleu, a.weighted_bleu, a.match_struc,
             a.match_df);
  return out.str();
}

metric::MetricWeights parse_weights(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      while (used < part.size() && std::isspace(static_cast<unsigned char>(part[used]))) ++used;
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      throw DomainError("invalid weight '" + part + "'");
    }
  }
  if (values.size() != 4) throw DomainError("expected four comma-separated weights, got '" + text + "'");
  metric::MetricWeights w{values[0], values[1], values[2], values[3]};
  w.validate();
  return w;
}

}  // namespace sketchkit::cli
