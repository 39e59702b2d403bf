#include "lbpforge/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "lbpforge/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace lbpforge {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

const char* mode_name(SearchMode m) { return m == SearchMode::Exhaustive ? "exhaustive" : "cmaes"; }

const char* sampling_name(Sampling s) { return s == Sampling::Bilinear ? "bilinear" : "nearest"; }

}  // namespace

double round4(double v) noexcept { return std::round(v * 1e4) / 1e4; }

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "scene,descriptor,precision,recall,fscore\n";
  for (const auto& r : rows) {
    out += csv_field(r.scene) + ',' + csv_field(r.descriptor) + ',' + fixed4(r.score.precision) + ',' +
           fixed4(r.score.recall) + ',' + fixed4(r.score.fscore) + '\n';
  }
  return out;
}

json report_json(const std::vector<ReportRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"scene", r.scene},
                   {"descriptor", r.descriptor},
                   {"precision", round4(r.score.precision)},
                   {"recall", round4(r.score.recall)},
                   {"fscore", round4(r.score.fscore)}});
  }
  return arr;
}

std::vector<ReportRow> parse_report_json(const json& j) {
  std::vector<ReportRow> rows;
  for (const auto& item : j) {
    ReportRow r;
    r.scene = item.at("scene").get<std::string>();
    r.descriptor = item.at("descriptor").get<std::string>();
    r.score.precision = item.at("precision").get<double>();
    r.score.recall = item.at("recall").get<double>();
    r.score.fscore = item.at("fscore").get<double>();
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write to " + path.string() + " failed");
}

void emit_report(const fs::path& dir, const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw EmptyInput("no report rows to write");
  write_text(dir / "report.csv", report_csv(rows));
  write_text(dir / "report.json", report_json(rows).dump(2) + "\n");
}

json to_json(const BgsParams& p) {
  return {{"histograms", p.histograms},
          {"proximity_threshold", p.proximity_threshold},
          {"background_threshold", p.background_threshold},
          {"histogram_rate", p.histogram_rate},
          {"weight_rate", p.weight_rate},
          {"region_radius", p.region_radius},
          {"initial_weight", p.initial_weight}};
}

json to_json(const NeighborhoodSpec& nb) {
  return {{"points", nb.points}, {"radius", nb.radius}, {"sampling", sampling_name(nb.sampling)}};
}

json to_json(const SearchConfig& c) {
  return {{"mode", mode_name(c.mode)},
          {"mutation_cap", c.mutation_cap},
          {"a_min", c.a_min},
          {"a_max", c.a_max},
          {"a_initial", c.a_initial},
          {"a_sigma", c.a_sigma},
          {"a_budget", c.a_budget},
          {"cmaes_budget", c.cmaes_budget},
          {"cmaes_sigma", c.cmaes_sigma},
          {"candidate_budget", c.candidate_budget},
          {"seed", c.seed},
          {"inject_baselines", c.inject_baselines},
          {"early_stop", c.early_stop},
          {"batch_size", c.batch_size}};
}

void from_json_into(const json& j, BgsParams& p) {
  p.histograms = j.value("histograms", p.histograms);
  p.proximity_threshold = j.value("proximity_threshold", p.proximity_threshold);
  p.background_threshold = j.value("background_threshold", p.background_threshold);
  p.histogram_rate = j.value("histogram_rate", p.histogram_rate);
  p.weight_rate = j.value("weight_rate", p.weight_rate);
  p.region_radius = j.value("region_radius", p.region_radius);
  p.initial_weight = j.value("initial_weight", p.initial_weight);
}

void from_json_into(const json& j, NeighborhoodSpec& nb) {
  nb.points = j.value("points", nb.points);
  nb.radius = j.value("radius", nb.radius);
  if (j.contains("sampling")) {
    const auto s = j.at("sampling").get<std::string>();
    if (s == "bilinear") {
      nb.sampling = Sampling::Bilinear;
    } else if (s == "nearest") {
      nb.sampling = Sampling::Nearest;
    } else {
      throw InvalidArgument("unknown sampling mode '" + s + "'");
    }
  }
}

void from_json_into(const json& j, SearchConfig& c) {
  if (j.contains("mode")) {
    const auto m = j.at("mode").get<std::string>();
    if (m == "exhaustive") {
      c.mode = SearchMode::Exhaustive;
    } else if (m == "cmaes") {
      c.mode = SearchMode::Cmaes;
    } else {
      throw InvalidArgument("unknown search mode '" + m + "'");
    }
  }
  c.mutation_cap = j.value("mutation_cap", c.mutation_cap);
  c.a_min = j.value("a_min", c.a_min);
  c.a_max = j.value("a_max", c.a_max);
  c.a_initial = j.value("a_initial", c.a_initial);
  c.a_sigma = j.value("a_sigma", c.a_sigma);
  c.a_budget = j.value("a_budget", c.a_budget);
  c.cmaes_budget = j.value("cmaes_budget", c.cmaes_budget);
  c.cmaes_sigma = j.value("cmaes_sigma", c.cmaes_sigma);
  c.candidate_budget = j.value("candidate_budget", c.candidate_budget);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  c.inject_baselines = j.value("inject_baselines", c.inject_baselines);
  c.early_stop = j.value("early_stop", c.early_stop);
  c.batch_size = j.value("batch_size", c.batch_size);
}

std::string assignment_string(const OperatorAssignment& codes) {
  std::string s;
  for (auto c : codes) s += op_symbol(static_cast<Op>(c));
  return s;
}

namespace {

json candidate_json(const Candidate& c) {
  return {{"equation", c.equation},
          {"source", c.source},
          {"assignment", assignment_string(c.assignment)},
          {"a", c.a},
          {"precision", c.score.precision},
          {"recall", c.score.recall},
          {"fscore", c.score.fscore},
          {"fitness", c.fitness},
          {"passes", c.passes},
          {"order", c.order}};
}

}  // namespace

json discovery_manifest(const DiscoveryResult& result, const std::string& scene, const SearchConfig& cfg,
                        const BgsParams& bgs, const NeighborhoodSpec& nb) {
  json candidates = json::array();
  for (const auto& c : result.ranked) candidates.push_back(candidate_json(c));
  return {{"scene", scene},
          {"seed", cfg.seed},
          {"config", {{"search", to_json(cfg)}, {"bgs", to_json(bgs)}, {"lbp", to_json(nb)}}},
          {"total_passes", result.total_passes},
          {"budget_passes", result.budget_passes},
          {"stopped_early", result.stopped_early},
          {"baseline_fitness", result.baseline_fitness},
          {"best", candidate_json(result.best())},
          {"best_trace", result.best_trace},
          {"candidates", candidates}};
}

json timings_json(const DiscoveryResult& result) {
  json arr = json::array();
  for (const auto& c : result.ranked) arr.push_back({{"equation", c.equation}, {"wall_seconds", c.wall_seconds}});
  return arr;
}

}  // namespace lbpforge
