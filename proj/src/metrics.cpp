#include "lbpforge/metrics.hpp"

#include <algorithm>
#include <string>

#include "lbpforge/errors.hpp"

namespace lbpforge {

namespace {

template <typename A, typename B>
void check_same_size(const A& a, const B& b) {
  if (a.width != b.width || a.height != b.height) {
    throw DimensionMismatch("mask is " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                            ", ground truth is " + std::to_string(b.width) + "x" + std::to_string(b.height));
  }
}

}  // namespace

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) noexcept {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

bool IgnoreLabels::ignored(std::uint8_t label) const noexcept {
  if (!labels) return label != 0 && label != 255;
  return std::find(labels->begin(), labels->end(), label) != labels->end();
}

ConfusionCounts confusion(const ForegroundMask& mask, const LabelImage& gt, const IgnoreLabels& ignore) {
  check_same_size(mask, gt);
  ConfusionCounts c;
  for (std::size_t i = 0; i < mask.pixels.size(); ++i) {
    const std::uint8_t label = gt.pixels[i];
    if (ignore.ignored(label)) continue;
    const bool truth = label == 255;
    const bool predicted = mask.pixels[i] != 0;
    if (truth) {
      ++(predicted ? c.tp : c.fn);
    } else {
      ++(predicted ? c.fp : c.tn);
    }
  }
  return c;
}

double fscore(double precision, double recall) noexcept {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

Score score(const ConfusionCounts& c) noexcept {
  Score s;
  const auto tp = static_cast<double>(c.tp);
  if (c.tp + c.fp > 0) s.precision = tp / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = tp / static_cast<double>(c.tp + c.fn);
  s.fscore = fscore(s.precision, s.recall);
  return s;
}

RgbImage render_diff(const ForegroundMask& mask, const LabelImage& gt, const IgnoreLabels& ignore) {
  check_same_size(mask, gt);
  RgbImage out(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.pixels.size(); ++i) {
    const std::uint8_t label = gt.pixels[i];
    const bool predicted = mask.pixels[i] != 0;
    Rgb color;
    if (ignore.ignored(label)) {
      color = kDiffIgnored;
    } else if (label == 255) {
      color = predicted ? kDiffTruePositive : kDiffFalseNegative;
    } else {
      color = predicted ? kDiffFalsePositive : kDiffTrueNegative;
    }
    out.pixels[i] = color;
  }
  return out;
}

}  // namespace lbpforge
