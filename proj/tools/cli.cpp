#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lbpforge/config.hpp"
#include "lbpforge/dataset.hpp"
#include "lbpforge/errors.hpp"
#include "lbpforge/expr.hpp"
#include "lbpforge/parallel.hpp"
#include "lbpforge/report.hpp"
#include "lbpforge/sampler.hpp"
#include "lbpforge/scene.hpp"
#include "lbpforge/search.hpp"

namespace fs = std::filesystem;

namespace lbpforge::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by the scene-driven subcommands. Unset flags leave the config
// value alone.
struct Overrides {
  std::string config;
  std::vector<std::string> scenes;
  std::optional<std::string> out;
  std::optional<int> first, last, burn_in;
  bool downscale = false;
  bool no_roi = false;
  std::optional<int> workers;

  std::optional<int> histograms, region_radius;
  std::optional<double> tp, tb, alpha_b, alpha_w, initial_weight;
  std::optional<int> points;
  std::optional<double> radius;
  std::optional<std::string> sampling;

  std::optional<std::string> descriptor, equation, corpus;
  std::optional<double> a, cs_threshold;

  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::size_t> cap, batch_size;
  std::optional<int> a_budget, cmaes_budget;
  std::optional<long> budget;
  bool early_stop = false;
  bool no_baselines = false;
};

void add_scene_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON run config; flags override it")->check(CLI::ExistingFile);
  app->add_option("--scene", o.scenes, "scene directory in CDnet layout (repeatable)");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--first", o.first, "first frame, 1-based");
  app->add_option("--last", o.last, "last frame, 1-based (0 = all)");
  app->add_option("--burn-in", o.burn_in, "leading frames excluded from scoring");
  app->add_flag("--downscale", o.downscale, "halve the resolution");
  app->add_flag("--no-roi", o.no_roi, "ignore temporalROI.txt");
  app->add_option("--workers", o.workers, "worker threads (0 = default)");
  app->add_option("--histograms", o.histograms, "histograms per pixel (K)");
  app->add_option("--tp", o.tp, "proximity threshold T_P");
  app->add_option("--tb", o.tb, "background threshold T_B");
  app->add_option("--alpha-b", o.alpha_b, "histogram learning rate");
  app->add_option("--alpha-w", o.alpha_w, "weight learning rate");
  app->add_option("--initial-weight", o.initial_weight, "weight of a replaced histogram");
  app->add_option("--region-radius", o.region_radius, "histogram region radius");
  app->add_option("--points", o.points, "neighbors P");
  app->add_option("--radius", o.radius, "neighborhood radius R");
  app->add_option("--sampling", o.sampling, "bilinear or nearest");
}

void add_descriptor_flags(CLI::App* app, Overrides& o) {
  app->add_option("--descriptor", o.descriptor, "original, modified, or cslbp");
  app->add_option("--equation", o.equation, "LBP equation, e.g. \"(g_p - g_c) + a\"");
  app->add_option("--a", o.a, "offset term a");
  app->add_option("--cs-threshold", o.cs_threshold, "CS-LBP threshold on the [0,1] scale");
}

void add_search_flags(CLI::App* app, Overrides& o) {
  app->add_option("--corpus", o.corpus, "newline-delimited equation file");
  app->add_option("--seed", o.seed, "random seed");
  app->add_option("--mode", o.mode, "exhaustive or cmaes");
  app->add_option("--cap", o.cap, "mutation cap per equation");
  app->add_option("--a-budget", o.a_budget, "BGS passes per candidate for fitting a");
  app->add_option("--cmaes-budget", o.cmaes_budget, "evaluations per equation in cmaes mode");
  app->add_option("--budget", o.budget, "total BGS passes (0 = unlimited)");
  app->add_option("--batch-size", o.batch_size, "candidates per scheduling batch");
  app->add_flag("--early-stop", o.early_stop, "stop after the first batch that beats the baselines");
  app->add_flag("--no-baselines", o.no_baselines, "do not inject the baseline equations");
}

template <class T>
void assign(std::optional<T> src, T& dst) {
  if (src) dst = *src;
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (!o.scenes.empty()) {
    SceneSource defaults = cfg.scenes.empty() ? SceneSource{} : cfg.scenes.front();
    cfg.scenes.clear();
    for (const auto& dir : o.scenes) {
      SceneSource s = defaults;
      s.dir = dir;
      s.name.clear();
      cfg.scenes.push_back(std::move(s));
    }
  }
  for (auto& s : cfg.scenes) {
    assign(o.first, s.first_frame);
    assign(o.last, s.last_frame);
    assign(o.burn_in, s.burn_in);
    if (o.downscale) s.downscale = true;
    if (o.no_roi) s.use_temporal_roi = false;
  }
  if (o.out) cfg.out = *o.out;
  assign(o.workers, cfg.search.workers);
  assign(o.histograms, cfg.bgs.histograms);
  assign(o.region_radius, cfg.bgs.region_radius);
  assign(o.tp, cfg.bgs.proximity_threshold);
  assign(o.tb, cfg.bgs.background_threshold);
  assign(o.alpha_b, cfg.bgs.histogram_rate);
  assign(o.alpha_w, cfg.bgs.weight_rate);
  assign(o.initial_weight, cfg.bgs.initial_weight);
  assign(o.points, cfg.neighborhood.points);
  assign(o.radius, cfg.neighborhood.radius);
  if (o.sampling) from_json_into(nlohmann::json{{"sampling", *o.sampling}}, cfg.neighborhood);
  assign(o.descriptor, cfg.descriptor);
  if (o.equation) cfg.equation = o.equation;
  if (o.a) cfg.a = o.a;
  assign(o.cs_threshold, cfg.cs_threshold);
  if (o.corpus) cfg.corpus = fs::path(*o.corpus);
  assign(o.seed, cfg.search.seed);
  if (o.mode) from_json_into(nlohmann::json{{"mode", *o.mode}}, cfg.search);
  assign(o.cap, cfg.search.mutation_cap);
  assign(o.batch_size, cfg.search.batch_size);
  assign(o.a_budget, cfg.search.a_budget);
  assign(o.cmaes_budget, cfg.search.cmaes_budget);
  assign(o.budget, cfg.search.candidate_budget);
  if (o.early_stop) cfg.search.early_stop = true;
  if (o.no_baselines) cfg.search.inject_baselines = false;
  if (cfg.scenes.empty()) throw UsageError("at least one --scene is required");
  cfg.validate();
  return cfg;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFrame("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<Expression> load_corpus(const fs::path& path) { return parse_corpus(read_file(path)); }

std::string frame_name(const char* prefix, int number) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%06d.png", prefix, number);
  return buf;
}

void print_rows(std::ostream& out, const std::vector<ReportRow>& rows) { out << report_csv(rows); }

// ---------------------------------------------------------------------------

int cmd_parse(const std::vector<std::string>& equations, const std::string& file, bool keep_going,
              std::ostream& out, std::ostream& err) {
  std::vector<std::string> lines = equations;
  if (!file.empty() || lines.empty()) {
    std::string text;
    if (file.empty() || file == "-") {
      text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
      text = read_file(file);
    }
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      lines.push_back(line);
    }
  }
  int status = 0;
  for (const auto& line : lines) {
    try {
      out << render(parse(line)) << '\n';
    } catch (const SyntaxError& e) {
      if (!keep_going) throw;
      out << "!error at " << e.offset() << ": " << e.what() << '\n';
      status = 2;
    }
  }
  if (status != 0) err << "error: some equations did not parse\n";
  return status;
}

int cmd_mutate(const std::string& equation, std::size_t cap, std::ostream& out) {
  for (const auto& m : enumerate_mutations(parse(equation), cap)) out << render(m) << '\n';
  return 0;
}

int cmd_sample(const GrammarSamplerConfig& cfg, const std::string& exclude_file, const std::string& out_file,
               std::ostream& out) {
  std::unordered_set<std::string> exclude;
  if (!exclude_file.empty()) {
    for (const auto& e : load_corpus(exclude_file)) exclude.insert(render(e));
  }
  std::string text;
  for (const auto& e : grammar_sample(cfg, exclude)) text += render(e) + '\n';
  if (out_file.empty() || out_file == "-") {
    out << text;
  } else {
    write_text(out_file, text);
  }
  return 0;
}

int cmd_synthesize(const SyntheticSceneSpec& spec, const std::string& dir, std::ostream& out) {
  const Scene scene = make_synthetic_scene(spec);
  write_scene(dir, scene);
  out << "wrote " << scene.frames.size() << " frames to " << dir << '\n';
  return 0;
}

// Descriptor selected by --equation or --descriptor; a missing a for an
// equation that uses it is fitted on the scene.
LbpDescriptor chosen_descriptor(const RunConfig& cfg, const Scene& scene, int threads) {
  if (cfg.equation) {
    const Expression e = parse(*cfg.equation);
    double a = cfg.a.value_or(cfg.search.a_initial);
    if (!cfg.a && e.contains(LeafKind::OffsetTerm)) {
      const EvaluationContext ctx{&scene, cfg.bgs, cfg.neighborhood};
      a = fit_a(e, ctx, cfg.search, cfg.search.a_budget, cfg.search.seed, threads).a;
    }
    return equation_descriptor(e, a, cfg.neighborhood);
  }
  double a = cfg.a.value_or(cfg.search.a_initial);
  if (cfg.descriptor == "modified" && !cfg.a) {
    const EvaluationContext ctx{&scene, cfg.bgs, cfg.neighborhood};
    a = fit_a(parse(kModifiedLbpEquation), ctx, cfg.search, cfg.search.a_budget, cfg.search.seed, threads).a;
  }
  return named_descriptor(cfg.descriptor, a, cfg.cs_threshold, cfg.neighborhood);
}

std::string row_label(const LbpDescriptor& d) {
  if (d.variant == DescriptorVariant::CenterSymmetric) return "CS-LBP";
  const std::string eq = d.name();
  if (eq == render(parse(kOriginalLbpEquation))) return "Original LBP";
  std::string label = eq == render(parse(kModifiedLbpEquation)) ? "Modified LBP" : eq;
  if (d.expression.contains(LeafKind::OffsetTerm)) {
    char buf[48];
    std::snprintf(buf, sizeof buf, " [a=%.4g]", d.a);
    label += buf;
  }
  return label;
}

int cmd_segment(const RunConfig& cfg, std::ostream& out) {
  const int threads = resolve_workers(cfg.search.workers);
  std::vector<ReportRow> rows;
  for (const auto& src : cfg.scenes) {
    const Scene scene = load_scene(src);
    const LbpDescriptor d = chosen_descriptor(cfg, scene, threads);
    const int m = d.neighborhood.margin();
    const int w = scene.frames.front().width;
    const int h = scene.frames.front().height;
    const fs::path masks = cfg.out / "masks" / scene.name;
    const fs::path diffs = cfg.out / "diff" / scene.name;
    const auto sink = [&](std::size_t i, const ForegroundMask& mask) {
      const int number = src.first_frame + static_cast<int>(i);
      write_labels(masks / frame_name("bin", number), mask_to_frame(mask, m, w, h));
      const LabelImage gt = scene.ground_truth[i].crop(m, m, mask.width, mask.height);
      write_rgb(diffs / frame_name("diff", number), render_diff(mask, gt, scene.ignore));
    };
    const SceneScore s = score_descriptor(d, scene, cfg.bgs, threads, sink);
    rows.push_back({scene.name, row_label(d), s.score});
  }
  emit_report(cfg.out, rows);
  print_rows(out, rows);
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, bool baselines, std::ostream& out) {
  const int threads = resolve_workers(cfg.search.workers);
  std::vector<Expression> corpus;
  if (cfg.corpus) corpus = load_corpus(*cfg.corpus);
  std::vector<ReportRow> rows;
  for (const auto& src : cfg.scenes) {
    const Scene scene = load_scene(src);
    const EvaluationContext ctx{&scene, cfg.bgs, cfg.neighborhood};
    std::vector<LbpDescriptor> descriptors;
    if (baselines) {
      descriptors.push_back(original_lbp(cfg.neighborhood));
      const double a = cfg.a && !cfg.equation
                           ? *cfg.a
                           : fit_a(parse(kModifiedLbpEquation), ctx, cfg.search, cfg.search.a_budget,
                                   cfg.search.seed, threads).a;
      descriptors.push_back(modified_lbp(a, cfg.neighborhood));
      descriptors.push_back(cs_lbp(cfg.cs_threshold, cfg.neighborhood));
      if (cfg.equation) descriptors.push_back(chosen_descriptor(cfg, scene, threads));
    } else if (cfg.equation || corpus.empty()) {
      descriptors.push_back(chosen_descriptor(cfg, scene, threads));
    }
    for (const auto& e : corpus) {
      double a = cfg.a.value_or(cfg.search.a_initial);
      if (!cfg.a && e.contains(LeafKind::OffsetTerm)) {
        a = fit_a(e, ctx, cfg.search, cfg.search.a_budget, cfg.search.seed, threads).a;
      }
      descriptors.push_back(equation_descriptor(e, a, cfg.neighborhood));
    }
    for (const auto& d : descriptors) {
      rows.push_back({scene.name, row_label(d), score_descriptor(d, scene, cfg.bgs, threads).score});
    }
  }
  emit_report(cfg.out, rows);
  print_rows(out, rows);
  return 0;
}

int cmd_discover(const RunConfig& cfg, std::ostream& out) {
  if (cfg.scenes.size() != 1) throw UsageError("discover takes exactly one scene");
  std::vector<Expression> equations;
  if (cfg.corpus) {
    equations = load_corpus(*cfg.corpus);
  } else if (cfg.equation) {
    equations.push_back(parse(*cfg.equation));
  } else {
    throw UsageError("discover needs --corpus or --equation");
  }
  const Scene scene = load_scene(cfg.scenes.front());
  const EvaluationContext ctx{&scene, cfg.bgs, cfg.neighborhood};
  const DiscoveryResult result = discover(equations, ctx, cfg.search);

  write_text(cfg.out / "manifest.json",
             discovery_manifest(result, scene.name, cfg.search, cfg.bgs, cfg.neighborhood).dump(2) + "\n");
  write_text(cfg.out / "timings.json", timings_json(result).dump(2) + "\n");
  const Candidate& best = result.best();
  std::ostringstream best_line;
  best_line.precision(17);
  best_line << best.equation << '\t' << best.a << '\n';
  write_text(cfg.out / "best.txt", best_line.str());

  std::vector<ReportRow> rows;
  const std::string original = render(parse(kOriginalLbpEquation));
  const std::string modified = render(parse(kModifiedLbpEquation));
  for (const auto& c : result.ranked) {
    if (c.source < 0 && (c.equation == original || c.equation == modified)) rows.push_back({scene.name, row_label(equation_descriptor(c.expression, c.a)), c.score});
  }
  rows.insert(rows.begin(), {scene.name, "best: " + row_label(equation_descriptor(best.expression, best.a)), best.score});
  emit_report(cfg.out, rows);
  print_rows(out, rows);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Texture background subtraction with searchable LBP equations", "lbpforge"};
  app.require_subcommand(1);
  Overrides o;

  auto* parse_cmd = app.add_subcommand("parse", "validate equations and print their canonical form");
  std::vector<std::string> parse_equations;
  std::string parse_file;
  bool keep_going = false;
  parse_cmd->add_option("equations", parse_equations, "equations (default: read lines from --file or stdin)");
  parse_cmd->add_option("--file", parse_file, "newline-delimited equations ('-' for stdin)");
  parse_cmd->add_flag("--keep-going", keep_going, "report bad lines inline instead of stopping");

  auto* mutate_cmd = app.add_subcommand("mutate", "print every operator mutation of an equation");
  std::string mutate_equation;
  std::size_t mutate_cap = 1024;
  mutate_cmd->add_option("--equation", mutate_equation, "equation")->required();
  mutate_cmd->add_option("--cap", mutate_cap, "maximum number of mutations");

  auto* sample_cmd = app.add_subcommand("sample", "draw a random equation corpus from the grammar");
  GrammarSamplerConfig sampler;
  std::string sample_out, sample_exclude;
  sample_cmd->add_option("--count", sampler.count, "number of equations")->required();
  sample_cmd->add_option("--seed", sampler.seed, "random seed");
  sample_cmd->add_option("--max-depth", sampler.max_depth, "operator depth limit");
  sample_cmd->add_option("--expand", sampler.expand_probability, "probability a subtree is an operator");
  sample_cmd->add_option("--exclude", sample_exclude, "corpus whose equations must not be drawn");
  sample_cmd->add_option("--out", sample_out, "output file (default stdout)");

  auto* synth_cmd = app.add_subcommand("synthesize", "write a synthetic scene in CDnet layout");
  SyntheticSceneSpec synth;
  std::string synth_dir;
  bool synth_static = false;
  synth_cmd->add_option("--out", synth_dir, "scene directory")->required();
  synth_cmd->add_option("--width", synth.width);
  synth_cmd->add_option("--height", synth.height);
  synth_cmd->add_option("--frames", synth.frames);
  synth_cmd->add_option("--square", synth.square, "moving square side");
  synth_cmd->add_option("--burn-in", synth.burn_in, "unscored leading frames");
  synth_cmd->add_option("--noise", synth.noise_sigma, "Gaussian noise sigma");
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_flag("--static", synth_static, "background only");

  auto* segment_cmd = app.add_subcommand("segment", "run one descriptor and write masks and diff images");
  add_scene_flags(segment_cmd, o);
  add_descriptor_flags(segment_cmd, o);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "score descriptors and write a precision/recall/F report");
  bool baselines = false;
  add_scene_flags(evaluate_cmd, o);
  add_descriptor_flags(evaluate_cmd, o);
  evaluate_cmd->add_option("--corpus", o.corpus, "also score every equation of this file");
  evaluate_cmd->add_option("--seed", o.seed, "seed for fitting a");
  evaluate_cmd->add_option("--a-budget", o.a_budget, "BGS passes for fitting a");
  evaluate_cmd->add_flag("--baselines", baselines, "Original LBP, Modified LBP, and CS-LBP rows");

  auto* discover_cmd = app.add_subcommand("discover", "search operator mutations of an equation corpus");
  add_scene_flags(discover_cmd, o);
  discover_cmd->add_option("--equation", o.equation, "single equation instead of a corpus");
  add_search_flags(discover_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (parse_cmd->parsed()) return cmd_parse(parse_equations, parse_file, keep_going, out, err);
    if (mutate_cmd->parsed()) return cmd_mutate(mutate_equation, mutate_cap, out);
    if (sample_cmd->parsed()) return cmd_sample(sampler, sample_exclude, sample_out, out);
    if (synth_cmd->parsed()) {
      synth.moving_object = !synth_static;
      return cmd_synthesize(synth, synth_dir, out);
    }
    if (segment_cmd->parsed()) return cmd_segment(resolve(o), out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(resolve(o), baselines, out);
    if (discover_cmd->parsed()) return cmd_discover(resolve(o), out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace lbpforge::cli
