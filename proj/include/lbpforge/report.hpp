#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lbpforge/bgs.hpp"
#include "lbpforge/lbp.hpp"
#include "lbpforge/metrics.hpp"
#include "lbpforge/search.hpp"

namespace lbpforge {

/// One (scene, descriptor) line of a precision/recall/F-score table.
struct ReportRow {
  std::string scene;
  std::string descriptor;
  Score score;
};

/// Rounds to the 4 decimals used in reports.
double round4(double v) noexcept;

std::string report_csv(const std::vector<ReportRow>& rows);
nlohmann::json report_json(const std::vector<ReportRow>& rows);

/// Writes <dir>/report.csv and <dir>/report.json. Throws EmptyInput (nothing
/// written) for an empty row set and IoError on write failure.
void emit_report(const std::filesystem::path& dir, const std::vector<ReportRow>& rows);

std::vector<ReportRow> parse_report_json(const nlohmann::json& j);

nlohmann::json to_json(const BgsParams& p);
nlohmann::json to_json(const NeighborhoodSpec& nb);
nlohmann::json to_json(const SearchConfig& cfg);
void from_json_into(const nlohmann::json& j, BgsParams& p);
void from_json_into(const nlohmann::json& j, NeighborhoodSpec& nb);
void from_json_into(const nlohmann::json& j, SearchConfig& cfg);

std::string assignment_string(const OperatorAssignment& codes);

/// Deterministic run record: identical inputs give byte-identical output.
/// Wall-clock times are kept out of it (see timings_json).
nlohmann::json discovery_manifest(const DiscoveryResult& result, const std::string& scene, const SearchConfig& cfg,
                                  const BgsParams& bgs, const NeighborhoodSpec& nb);
nlohmann::json timings_json(const DiscoveryResult& result);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace lbpforge
