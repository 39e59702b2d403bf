#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "lbpforge/config.hpp"
#include "lbpforge/dataset.hpp"
#include "lbpforge/errors.hpp"
#include "lbpforge/report.hpp"
#include "support.hpp"

using namespace lbpforge;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("lbpforge-test-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lbpforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scene tiny_scene(int w, int h, int frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Scene s;
  s.name = "tiny";
  for (int i = 0; i < frames; ++i) {
    s.frames.push_back(testing_support::random_gray(w, h, rng));
    LabelImage gt(w, h, 0);
    gt.at(1, 1) = 255;
    gt.at(2, 1) = 170;
    gt.at(3, 1) = 50;
    s.ground_truth.push_back(gt);
  }
  return s;
}

}  // namespace

TEST_CASE("scene round trip") {
  TempDir tmp;
  Scene s = tiny_scene(16, 12, 150, 1);
  s.eval_begin = 20;
  s.eval_end = 140;
  write_scene(tmp.path / "scene", s);

  SceneSource src;
  src.dir = tmp.path / "scene";
  const Scene loaded = load_scene(src);
  CHECK(loaded.name == "scene");
  CHECK(loaded.frames.size() == 150);
  CHECK(loaded.eval_begin == 20);
  CHECK(loaded.scored_end() == 140);
  CHECK(loaded.frames[7].pixels == s.frames[7].pixels);
  CHECK(loaded.ground_truth[3].pixels == s.ground_truth[3].pixels);
  CHECK(loaded.ground_truth[0].at(2, 1) == 170);

  src.use_temporal_roi = false;
  src.first_frame = 11;
  src.last_frame = 60;
  src.burn_in = 5;
  const Scene window = load_scene(src);
  CHECK(window.frames.size() == 50);
  CHECK(window.eval_begin == 5);
  CHECK(window.scored_end() == 50);
  CHECK(window.frames[0].pixels == s.frames[10].pixels);

  src.last_frame = 151;
  CHECK_THROWS_AS(load_scene(src), MissingFrame);
  src.dir = tmp.path / "nowhere";
  CHECK_THROWS_AS(load_scene(src), MissingFrame);

  fs::remove(tmp.path / "scene" / "groundtruth" / "gt000150.png");
  src.dir = tmp.path / "scene";
  src.last_frame = 0;
  CHECK_THROWS_AS(load_scene(src), PairMismatch);
}

TEST_CASE("downscaled load") {
  TempDir tmp;
  Scene s = tiny_scene(640, 480, 2, 2);
  s.ground_truth[1].at(100, 100) = 255;
  write_scene(tmp.path / "big", s);
  SceneSource src;
  src.dir = tmp.path / "big";
  src.downscale = true;
  const Scene half = load_scene(src);
  REQUIRE(half.frames.size() == 2);
  CHECK(half.frames[0].width == 320);
  CHECK(half.frames[0].height == 240);
  CHECK(half.ground_truth[1].width == 320);
  CHECK(half.ground_truth[1].at(50, 50) == 255);
  const double mean = (s.frames[0].at(0, 0) + s.frames[0].at(1, 0) + s.frames[0].at(0, 1) + s.frames[0].at(1, 1)) / 4;
  CHECK(half.frames[0].at(0, 0) == std::floor(mean + 0.5));
}

TEST_CASE("downscale helpers") {
  GrayImage g(3, 3);
  for (int i = 0; i < 9; ++i) g.pixels[i] = i;
  const GrayImage d = downscale_box(g);
  CHECK(d.width == 2);
  CHECK(d.height == 2);
  CHECK(d.at(0, 0) == 2);  // mean of 0 1 3 4
  CHECK(d.at(1, 0) == 4);  // mean of 2 5 = 3.5, rounded half up
  CHECK(d.at(1, 1) == 8);
  LabelImage l(3, 1);
  l.pixels = {170, 0, 255};
  const LabelImage dl = downscale_nearest(l);
  CHECK(dl.pixels == std::vector<std::uint8_t>{170, 255});
  CHECK(luma(255, 255, 255) == 255);
  CHECK(luma(0, 0, 0) == 0);
  CHECK(luma(255, 0, 0) == 76);
}

TEST_CASE("reports") {
  TempDir tmp;
  const std::vector<ReportRow> rows{
      {"street", "Original LBP", {0.81234, 0.7, 0.75}},
      {"street", "Modified LBP [a=2.5]", {0.6, 0.9, fscore(0.6, 0.9)}},
      {"street", "CS-LBP", {0.5, 0.5, 0.5}},
      {"street", "(g_p / g_c) - g_p + a", {0.9, 0.8, fscore(0.9, 0.8)}},
  };
  emit_report(tmp.path / "r", rows);
  const std::string csv = slurp(tmp.path / "r" / "report.csv");
  CHECK(csv.rfind("scene,descriptor,precision,recall,fscore\n", 0) == 0);
  CHECK(csv.find("street,Original LBP,0.8123,0.7000,0.7500\n") != std::string::npos);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 5);

  const auto j = nlohmann::json::parse(slurp(tmp.path / "r" / "report.json"));
  REQUIRE(j.is_array());
  CHECK(j.size() == 4);
  const auto back = parse_report_json(j);
  CHECK(back[1].descriptor == "Modified LBP [a=2.5]");
  CHECK(back[0].score.precision == 0.8123);
  CHECK(back[3].score.fscore == round4(fscore(0.9, 0.8)));

  CHECK_THROWS_AS(emit_report(tmp.path / "empty", {}), EmptyInput);
  CHECK_FALSE(fs::exists(tmp.path / "empty" / "report.csv"));

  const std::string quoted = report_csv({{"a,b", "say \"hi\"", {}}});
  CHECK(quoted.find("\"a,b\",\"say \"\"hi\"\"\"") != std::string::npos);
}

TEST_CASE("run config") {
  TempDir tmp;
  fs::create_directories(tmp.path / "s1");
  const auto j = nlohmann::json::parse(R"({
    "scenes": ["SCENE", {"dir": "SCENE", "name": "other", "first": 3, "burn_in": 2}],
    "first": 2, "burn_in": 7, "downscale": true,
    "descriptor": "modified", "a": 4.5,
    "bgs": {"histograms": 4, "region_radius": 3},
    "lbp": {"points": 16, "radius": 2, "sampling": "nearest"},
    "search": {"seed": 42, "mode": "cmaes", "cmaes_budget": 9},
    "out": "results"
  })");
  auto text = j.dump();
  const std::string dir = (tmp.path / "s1").string();
  for (std::size_t pos; (pos = text.find("SCENE")) != std::string::npos;) text.replace(pos, 5, dir);
  const RunConfig cfg = run_config_from_json(nlohmann::json::parse(text));
  REQUIRE(cfg.scenes.size() == 2);
  CHECK(cfg.scenes[0].first_frame == 2);
  CHECK(cfg.scenes[0].burn_in == 7);
  CHECK(cfg.scenes[0].downscale);
  CHECK(cfg.scenes[1].name == "other");
  CHECK(cfg.scenes[1].first_frame == 3);
  CHECK(cfg.scenes[1].burn_in == 2);
  CHECK(cfg.descriptor == "modified");
  CHECK(cfg.a == 4.5);
  CHECK(cfg.bgs.histograms == 4);
  CHECK(cfg.bgs.region_radius == 3);
  CHECK(cfg.neighborhood.points == 16);
  CHECK(cfg.neighborhood.sampling == Sampling::Nearest);
  CHECK(cfg.search.seed == 42);
  CHECK(cfg.search.mode == SearchMode::Cmaes);
  CHECK(cfg.search.cmaes_budget == 9);
  CHECK(cfg.out == "results");
  CHECK_NOTHROW(cfg.validate());

  CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"lbp": {"sampling": "cubic"}})")), InvalidArgument);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"bgs": {"histograms": "many"}})")), DataError);

  BgsParams p;
  p.proximity_threshold = 0.5;
  BgsParams q;
  from_json_into(to_json(p), q);
  CHECK(q.proximity_threshold == 0.5);

  CHECK(named_descriptor("cslbp", 0, 0.02, NeighborhoodSpec{}).variant == DescriptorVariant::CenterSymmetric);
  CHECK_THROWS_AS(named_descriptor("fancy", 0, 0.01, NeighborhoodSpec{}), InvalidArgument);
}

TEST_CASE("cli basics") {
  CliResult r = run_cli({"mutate", "--equation", "g_p - g_c"});
  CHECK(r.code == 0);
  CHECK(r.out == "(g_p + g_c)\n(g_p - g_c)\n(g_p * g_c)\n(g_p / g_c)\n");

  r = run_cli({"parse", "g_p-g_c", "(g_p / g_c) - g_p + a"});
  CHECK(r.code == 0);
  CHECK(r.out == "(g_p - g_c)\n(((g_p / g_c) - g_p) + a)\n");

  r = run_cli({"parse", "g_p + g_x"});
  CHECK(r.code == 2);
  CHECK(r.err.find("6") != std::string::npos);

  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK(run_cli({"mutate"}).code == 1);
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"evaluate", "--scene", "/nonexistent/scene"}).code == 2);
  CHECK(run_cli({"evaluate"}).code == 1);

  r = run_cli({"sample", "--count", "5", "--seed", "3"});
  CHECK(r.code == 0);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 5);
  CHECK(run_cli({"sample", "--count", "5", "--seed", "3"}).out == r.out);
  // Every sampled line parses back to itself.
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);) CHECK(render(parse(line)) == line);
}

TEST_CASE("cli end to end") {
  TempDir tmp;
  const std::string scene = (tmp.path / "synth").string();
  CliResult r = run_cli({"synthesize", "--out", scene, "--width", "32", "--height", "32", "--frames", "24",
                         "--square", "8", "--burn-in", "8"});
  REQUIRE(r.code == 0);
  CHECK(slurp(tmp.path / "synth" / "temporalROI.txt") == "9 24\n");

  const std::string out = (tmp.path / "eval").string();
  r = run_cli({"evaluate", "--scene", scene, "--out", out, "--baselines", "--a-budget", "3", "--region-radius", "2"});
  REQUIRE(r.code == 0);
  const auto report = parse_report_json(nlohmann::json::parse(slurp(tmp.path / "eval" / "report.json")));
  REQUIRE(report.size() == 3);
  CHECK(report[0].descriptor == "Original LBP");
  CHECK(report[1].descriptor.rfind("Modified LBP [a=", 0) == 0);
  CHECK(report[2].descriptor == "CS-LBP");
  for (const auto& row : report) {
    CHECK(row.scene == "synth");
    CHECK(row.score.fscore >= 0.0);
    CHECK(row.score.fscore <= 1.0);
  }

  const std::string seg = (tmp.path / "seg").string();
  r = run_cli({"segment", "--scene", scene, "--out", seg, "--region-radius", "2", "--descriptor", "original"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(tmp.path / "seg" / "masks" / "synth" / "bin000001.png"));
  CHECK(fs::exists(tmp.path / "seg" / "diff" / "synth" / "diff000024.png"));
  const LabelImage mask = read_labels(tmp.path / "seg" / "masks" / "synth" / "bin000024.png");
  CHECK(mask.width == 32);
  for (auto v : mask.pixels) CHECK((v == 0 || v == 255));

  std::ofstream(tmp.path / "corpus.txt") << "# two equations\n(g_p - g_c) * g_c\n\ng_p / (g_c + a)\n";
  std::string manifests[2];
  for (int i = 0; i < 2; ++i) {
    const std::string dir = (tmp.path / ("disc" + std::to_string(i))).string();
    r = run_cli({"discover", "--scene", scene, "--corpus", (tmp.path / "corpus.txt").string(), "--out", dir,
                 "--seed", "5", "--a-budget", "2", "--budget", "40", "--region-radius", "2",
                 "--workers", i == 0 ? "1" : "2"});
    REQUIRE(r.code == 0);
    manifests[i] = slurp(fs::path(dir) / "manifest.json");
    CHECK(fs::exists(fs::path(dir) / "timings.json"));
    CHECK(fs::exists(fs::path(dir) / "best.txt"));
  }
  CHECK(manifests[0] == manifests[1]);
  const auto m = nlohmann::json::parse(manifests[0]);
  CHECK(m["seed"] == 5);
  CHECK(m["total_passes"].get<long>() <= 40);
  CHECK(m["candidates"].size() >= 2);
  CHECK(m["best"]["fitness"].get<double>() <= m["baseline_fitness"].get<double>());
  const auto disc_report = parse_report_json(nlohmann::json::parse(slurp(tmp.path / "disc0" / "report.json")));
  CHECK(disc_report.size() == 3);

  CHECK(run_cli({"discover", "--scene", scene, "--scene", scene, "--equation", "g_p - g_c"}).code == 1);
  std::ofstream(tmp.path / "bad.txt") << "g_p - g_c\ng_p ++ g_c\n";
  r = run_cli({"discover", "--scene", scene, "--corpus", (tmp.path / "bad.txt").string(), "--out",
               (tmp.path / "bad").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
}
