#include <doctest.h>

#include <cmath>
#include <random>

#include "lbpforge/errors.hpp"
#include "lbpforge/metrics.hpp"

using namespace lbpforge;

namespace {

ForegroundMask mask_from(int w, int h, std::initializer_list<int> v) {
  ForegroundMask m(w, h);
  std::size_t i = 0;
  for (int x : v) m.pixels[i++] = static_cast<std::uint8_t>(x);
  return m;
}

LabelImage labels_from(int w, int h, std::initializer_list<int> v) {
  LabelImage l(w, h);
  std::size_t i = 0;
  for (int x : v) l.pixels[i++] = static_cast<std::uint8_t>(x);
  return l;
}

}  // namespace

TEST_CASE("score from counts") {
  ConfusionCounts c{8, 2, 0, 2};
  const Score s = score(c);
  CHECK(s.precision == doctest::Approx(0.8));
  CHECK(s.recall == doctest::Approx(0.8));
  CHECK(s.fscore == doctest::Approx(0.8));

  const Score zero = score(ConfusionCounts{});
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.fscore == 0.0);

  CHECK(std::abs(fscore(0.8163, 0.8098) - 0.8130) < 5e-5);
  CHECK(fscore(0.0, 0.0) == 0.0);
  CHECK(fitness(s) == doctest::Approx(0.2));
}

TEST_CASE("confusion counts") {
  const LabelImage gt = labels_from(4, 1, {0, 255, 255, 0});
  ForegroundMask same = mask_from(4, 1, {0, 1, 1, 0});
  const ConfusionCounts c = confusion(same, gt);
  CHECK(c == ConfusionCounts{2, 0, 2, 0});

  const ConfusionCounts all_fg = confusion(ForegroundMask(4, 1, 1), LabelImage(4, 1, 0));
  CHECK(all_fg.fp == 4);
  CHECK(all_fg.tp + all_fg.tn + all_fg.fn == 0);

  const ConfusionCounts mixed = confusion(mask_from(4, 1, {1, 0, 1, 0}), gt);
  CHECK(mixed == ConfusionCounts{1, 1, 1, 1});

  CHECK_THROWS_AS(confusion(ForegroundMask(3, 1), gt), DimensionMismatch);

  ConfusionCounts sum = c;
  sum += mixed;
  CHECK(sum == ConfusionCounts{3, 1, 3, 1});
  CHECK(sum.total() == 8);
}

TEST_CASE("ignored labels") {
  const LabelImage gt = labels_from(5, 1, {0, 50, 85, 170, 255});
  const ConfusionCounts c = confusion(ForegroundMask(5, 1, 1), gt);
  CHECK(c == ConfusionCounts{1, 1, 0, 0});

  IgnoreLabels only_unknown;
  only_unknown.labels = std::vector<std::uint8_t>{170};
  CHECK(only_unknown.ignored(170));
  CHECK_FALSE(only_unknown.ignored(50));
  // Counted non-255 labels are negatives.
  CHECK(confusion(ForegroundMask(5, 1, 1), gt, only_unknown) == ConfusionCounts{1, 3, 0, 0});

  IgnoreLabels none;
  none.labels = std::vector<std::uint8_t>{};
  CHECK(confusion(ForegroundMask(5, 1, 0), gt, none) == ConfusionCounts{0, 0, 4, 1});
}

TEST_CASE("swapping mask and truth swaps FP and FN") {
  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 20; ++trial) {
    ForegroundMask a(17, 9), b(17, 9);
    LabelImage la(17, 9), lb(17, 9);
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
      a.pixels[i] = coin(rng);
      b.pixels[i] = coin(rng);
      la.pixels[i] = a.pixels[i] ? 255 : 0;
      lb.pixels[i] = b.pixels[i] ? 255 : 0;
    }
    const ConfusionCounts ab = confusion(a, lb);
    const ConfusionCounts ba = confusion(b, la);
    CHECK(ab.tp == ba.tp);
    CHECK(ab.tn == ba.tn);
    CHECK(ab.fp == ba.fn);
    CHECK(ab.fn == ba.fp);
    CHECK(confusion(a, la).fp == 0);
    CHECK(confusion(a, la).fn == 0);
  }
}

TEST_CASE("diff rendering colors") {
  const LabelImage gt = labels_from(3, 2, {255, 0, 0, 255, 170, 255});
  const ForegroundMask m = mask_from(3, 2, {1, 0, 1, 0, 1, 1});
  const RgbImage diff = render_diff(m, gt);
  CHECK(diff.at(0, 0) == kDiffTruePositive);
  CHECK(diff.at(1, 0) == kDiffTrueNegative);
  CHECK(diff.at(2, 0) == kDiffFalsePositive);
  CHECK(diff.at(0, 1) == kDiffFalseNegative);
  CHECK(diff.at(1, 1) == kDiffIgnored);
  CHECK(diff.at(2, 1) == kDiffTruePositive);
  CHECK(kDiffFalsePositive == Rgb{255, 0, 0});
  CHECK(kDiffFalseNegative == Rgb{0, 255, 0});
  CHECK(kDiffIgnored == Rgb{128, 128, 128});
  CHECK_THROWS_AS(render_diff(ForegroundMask(2, 2), gt), DimensionMismatch);
}
