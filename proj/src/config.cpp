#include "lbpforge/config.hpp"

#include <fstream>

#include "lbpforge/errors.hpp"
#include "lbpforge/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace lbpforge {

void RunConfig::validate() const {
  bgs.validate();
  neighborhood.validate();
  search.validate();
  for (const auto& s : scenes) {
    if (!fs::is_directory(s.dir)) throw MissingFrame("scene directory " + s.dir.string() + " does not exist");
  }
  if (corpus && !fs::exists(*corpus)) throw MissingFrame("corpus " + corpus->string() + " does not exist");
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw DataError("run config must be a JSON object");
  RunConfig cfg;
  try {
    SceneSource defaults;
    defaults.first_frame = j.value("first", defaults.first_frame);
    defaults.last_frame = j.value("last", defaults.last_frame);
    defaults.burn_in = j.value("burn_in", defaults.burn_in);
    defaults.downscale = j.value("downscale", defaults.downscale);
    defaults.use_temporal_roi = j.value("temporal_roi", defaults.use_temporal_roi);
    if (j.contains("scenes")) {
      for (const auto& item : j.at("scenes")) {
        SceneSource s = defaults;
        if (item.is_string()) {
          s.dir = item.get<std::string>();
        } else {
          s.dir = item.at("dir").get<std::string>();
          s.name = item.value("name", s.name);
          s.first_frame = item.value("first", s.first_frame);
          s.last_frame = item.value("last", s.last_frame);
          s.burn_in = item.value("burn_in", s.burn_in);
          s.downscale = item.value("downscale", s.downscale);
          s.use_temporal_roi = item.value("temporal_roi", s.use_temporal_roi);
        }
        cfg.scenes.push_back(std::move(s));
      }
    }
    cfg.descriptor = j.value("descriptor", cfg.descriptor);
    if (j.contains("equation")) cfg.equation = j.at("equation").get<std::string>();
    if (j.contains("a")) cfg.a = j.at("a").get<double>();
    if (j.contains("corpus")) cfg.corpus = j.at("corpus").get<std::string>();
    cfg.cs_threshold = j.value("cs_threshold", cfg.cs_threshold);
    if (j.contains("bgs")) from_json_into(j.at("bgs"), cfg.bgs);
    if (j.contains("lbp")) from_json_into(j.at("lbp"), cfg.neighborhood);
    if (j.contains("search")) from_json_into(j.at("search"), cfg.search);
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  } catch (const json::exception& e) {
    throw DataError(std::string("bad run config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFrame("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DecodeError("cannot parse " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

LbpDescriptor named_descriptor(const std::string& descriptor, double a, double cs_threshold,
                               const NeighborhoodSpec& nb) {
  if (descriptor == "original") return original_lbp(nb);
  if (descriptor == "modified") return modified_lbp(a, nb);
  if (descriptor == "cslbp") return cs_lbp(cs_threshold, nb);
  throw InvalidArgument("unknown descriptor '" + descriptor + "' (expected original, modified, or cslbp)");
}

}  // namespace lbpforge
