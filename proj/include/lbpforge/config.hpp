#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lbpforge/bgs.hpp"
#include "lbpforge/dataset.hpp"
#include "lbpforge/lbp.hpp"
#include "lbpforge/search.hpp"

namespace lbpforge {

/// Everything a CLI run needs. Loaded from one JSON document; command-line
/// flags are applied on top.
struct RunConfig {
  std::vector<SceneSource> scenes;
  std::string descriptor = "original";  // original | modified | cslbp
  std::optional<std::string> equation;
  std::optional<double> a;
  std::optional<std::filesystem::path> corpus;
  double cs_threshold = 0.01;
  BgsParams bgs;
  NeighborhoodSpec neighborhood;
  SearchConfig search;
  std::filesystem::path out = "out";

  /// Checks parameter ranges and that referenced paths exist.
  void validate() const;
};

/// Scene entries may be a directory string or an object with dir, name,
/// first, last, burn_in, temporal_roi. Top-level first/last/burn_in/downscale
/// act as defaults for every scene.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Builds the descriptor named by `descriptor` ("original", "modified",
/// "cslbp"). Throws InvalidArgument for anything else.
LbpDescriptor named_descriptor(const std::string& descriptor, double a, double cs_threshold,
                               const NeighborhoodSpec& nb);

}  // namespace lbpforge
