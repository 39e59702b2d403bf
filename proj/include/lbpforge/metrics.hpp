#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lbpforge/image.hpp"

namespace lbpforge {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept;
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
};

/// Which ground-truth labels are left out of the counts. Label 255 is the
/// positive class and every other counted label is negative. By default
/// every label outside {0, 255} is ignored (CDnet shadow 50, outside-ROI 85,
/// unknown 170).
struct IgnoreLabels {
  std::optional<std::vector<std::uint8_t>> labels;

  bool ignored(std::uint8_t label) const noexcept;
};

/// Pixelwise counts of `mask` against `gt` of the same size. Throws
/// DimensionMismatch.
ConfusionCounts confusion(const ForegroundMask& mask, const LabelImage& gt, const IgnoreLabels& ignore = {});

Score score(const ConfusionCounts& c) noexcept;

// F = 2PR / (P + R), or 0 when P + R = 0.
double fscore(double precision, double recall) noexcept;

inline double fitness(const Score& s) noexcept { return 1.0 - s.fscore; }

/// TP white, TN black, FP red, FN green, ignored gray.
RgbImage render_diff(const ForegroundMask& mask, const LabelImage& gt, const IgnoreLabels& ignore = {});

inline constexpr Rgb kDiffTruePositive{255, 255, 255};
inline constexpr Rgb kDiffTrueNegative{0, 0, 0};
inline constexpr Rgb kDiffFalsePositive{255, 0, 0};
inline constexpr Rgb kDiffFalseNegative{0, 255, 0};
inline constexpr Rgb kDiffIgnored{128, 128, 128};

}  // namespace lbpforge
