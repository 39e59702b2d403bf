#include <doctest.h>

#include <cmath>
#include <random>

#include "lbpforge/errors.hpp"
#include "lbpforge/lbp.hpp"
#include "support.hpp"

using namespace lbpforge;
using testing_support::oracle_lbp3x3;
using testing_support::random_gray;

namespace {

NeighborhoodSpec nearest8() {
  NeighborhoodSpec nb;
  nb.sampling = Sampling::Nearest;
  return nb;
}

bool same_codes(const CodeMap& a, const CodeMap& b) {
  return a.width == b.width && a.height == b.height && a.codes == b.codes;
}

}  // namespace

TEST_CASE("sample_neighbors") {
  const GrayImage flat(5, 5, 7.0);
  for (auto mode : {Sampling::Bilinear, Sampling::Nearest}) {
    NeighborhoodSpec nb;
    nb.sampling = mode;
    for (double g : sample_neighbors(flat, 2, 2, nb)) CHECK(g == 7.0);
  }

  GrayImage img(3, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) img.at(x, y) = 10 * y + x;
  }
  NeighborhoodSpec four;
  four.points = 4;
  four.sampling = Sampling::Nearest;
  const auto g = sample_neighbors(img, 1, 1, four);
  CHECK(g == std::vector<double>{12, 1, 10, 21});  // east, north, west, south

  GrayImage ramp(5, 5);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) ramp.at(x, y) = x;
  }
  const auto r = sample_neighbors(ramp, 2, 2, NeighborhoodSpec{});
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(r[0] == 3.0);
  CHECK(r[2] == 2.0);
  CHECK(r[4] == 1.0);
  CHECK(r[6] == 2.0);
  CHECK(r[1] == doctest::Approx(2 + h).epsilon(1e-4));
  CHECK(r[7] == doctest::Approx(2 + h).epsilon(1e-4));
  CHECK(r[3] == doctest::Approx(2 - h).epsilon(1e-4));
  CHECK(r[5] == doctest::Approx(2 - h).epsilon(1e-4));

  CHECK_THROWS_AS(sample_neighbors(img, 0, 1, NeighborhoodSpec{}), OutOfBounds);
  NeighborhoodSpec wide;
  wide.radius = 1.5;
  CHECK_THROWS_AS(sample_neighbors(GrayImage(4, 4), 1, 1, wide), OutOfBounds);
}

TEST_CASE("lbp_code examples") {
  const GrayImage flat(3, 3, 50.0);
  CHECK(lbp_code(original_lbp(), flat, 1, 1) == 255);
  CHECK(lbp_code(modified_lbp(-1.0), flat, 1, 1) == 0);

  // Neighbors p = 0..7 around a center of 100.
  const double ring[8] = {101, 99, 102, 98, 103, 97, 100, 104};
  static constexpr int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr int dy[8] = {0, -1, -1, -1, 0, 1, 1, 1};
  GrayImage img(3, 3, 0.0);
  img.at(1, 1) = 100;
  for (int p = 0; p < 8; ++p) img.at(1 + dx[p], 1 + dy[p]) = ring[p];
  std::uint32_t expect = 0;
  for (int p = 0; p < 8; ++p) expect |= (ring[p] - 100 >= 0 ? 1u : 0u) << p;
  REQUIRE(expect == 213);
  CHECK(lbp_code(original_lbp(nearest8()), img, 1, 1) == 213);
  CHECK(lbp_image(original_lbp(nearest8()), img).at(0, 0) == 213);
}

TEST_CASE("generalized evaluator matches a direct 3x3 oracle") {
  std::mt19937_64 rng(17);
  const LbpDescriptor d = original_lbp(nearest8());
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const GrayImage patch = random_gray(3, 3, rng);
    mismatches += lbp_code(d, patch, 1, 1) != oracle_lbp3x3(patch, 1, 1);
  }
  CHECK(mismatches == 0);

  const GrayImage big = random_gray(40, 30, rng);
  const CodeMap map = lbp_image(d, big);
  mismatches = 0;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) mismatches += map.at(x, y) != oracle_lbp3x3(big, x + 1, y + 1);
  }
  CHECK(mismatches == 0);
}

TEST_CASE("lbp_image geometry and errors") {
  const CodeMap one = lbp_image(original_lbp(), GrayImage(3, 3, 9.0));
  CHECK(one.width == 1);
  CHECK(one.height == 1);
  CHECK(one.bins == 256);
  CHECK(one.at(0, 0) == 255);

  const CodeMap flat = lbp_image(original_lbp(), GrayImage(10, 8, 3.0));
  CHECK(flat.width == 8);
  CHECK(flat.height == 6);
  for (auto c : flat.codes) CHECK(c == 255);

  CHECK_THROWS_AS(lbp_image(original_lbp(), GrayImage(2, 5)), ImageTooSmall);
  NeighborhoodSpec r2;
  r2.radius = 2;
  CHECK_THROWS_AS(lbp_image(original_lbp(r2), GrayImage(4, 9)), ImageTooSmall);
  CHECK(lbp_image(original_lbp(r2), GrayImage(5, 9)).width == 1);
}

TEST_CASE("kernel matches the serial reference bit for bit") {
  std::mt19937_64 rng(23);
  const GrayImage img = random_gray(37, 29, rng);
  NeighborhoodSpec p16;
  p16.points = 16;
  p16.radius = 2;
  const LbpDescriptor descriptors[] = {
      original_lbp(),
      modified_lbp(4.46),
      cs_lbp(),
      equation_descriptor(parse("((g_p / g_c) - g_p) + a"), 11.05),
      equation_descriptor(parse("(g_p - (g_p - g_c) * (g_p - g_c)) + a"), 8.03, nearest8()),
      equation_descriptor(parse("(g_p + g_c) / (g_p - g_c) + a"), 0.67, p16),
  };
  for (const auto& d : descriptors) {
    const CodeMap ref = lbp_image_reference(d, img);
    for (int threads : {1, 2, 4}) CHECK(same_codes(lbp_image(d, img, threads), ref));
  }
}

TEST_CASE("illumination invariance of the original operator") {
  std::mt19937_64 rng(31);
  for (auto mode : {Sampling::Bilinear, Sampling::Nearest}) {
    NeighborhoodSpec nb;
    nb.sampling = mode;
    const LbpDescriptor d = original_lbp(nb);
    for (int i = 0; i < 20; ++i) {
      GrayImage img = random_gray(16, 16, rng);
      for (double& v : img.pixels) v = std::floor(v * 200.0 / 255.0);
      const CodeMap base = lbp_image(d, img);
      for (double c : {1.0, 50.0}) {
        GrayImage lifted = img;
        for (double& v : lifted.pixels) v += c;
        CHECK(same_codes(lbp_image(d, lifted), base));
      }
    }
  }
}

TEST_CASE("modified operator with a = 0 reduces to the original") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 10; ++i) {
    const GrayImage img = random_gray(20, 20, rng);
    CHECK(same_codes(lbp_image(modified_lbp(0.0), img), lbp_image(original_lbp(), img)));
  }
}

TEST_CASE("CS-LBP codes") {
  std::mt19937_64 rng(41);
  const LbpDescriptor d = cs_lbp();
  CHECK(d.bin_count() == 16);
  const CodeMap map = lbp_image(d, random_gray(50, 50, rng));
  std::uint32_t hi = 0;
  for (auto c : map.codes) hi = std::max(hi, c);
  CHECK(hi <= 15);
  CHECK(hi == 15);

  // Pair 0 is east vs west: differences strictly above T set the bit.
  GrayImage img(3, 3, 100.0);
  img.at(2, 1) = 103;  // 3/255 > 0.01
  CHECK(lbp_code(d, img, 1, 1) == 1);
  img.at(2, 1) = 102;  // 2/255 < 0.01
  CHECK(lbp_code(d, img, 1, 1) == 0);
  CHECK(lbp_code(d, GrayImage(3, 3, 5.0), 1, 1) == 0);

  LbpDescriptor odd = cs_lbp();
  odd.neighborhood.points = 7;
  CHECK_THROWS_AS(odd.validate(), InvalidArgument);
}

TEST_CASE("region histograms") {
  CodeMap map;
  map.width = 4;
  map.height = 4;
  map.bins = 256;
  map.codes.assign(16, 9);
  Histogram h = region_histogram(map, 1, 1, 4);
  CHECK(h.size() == 256);
  CHECK(h.bins[9] == 1.0);
  CHECK(h.sum() == 1.0);

  map.codes = {0, 0, 0, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2};
  h = region_histogram(map, 0, 0, 0);
  CHECK(h.bins[0] == 1.0);
  // The clipped 2x2 window at the top-right corner holds codes {0, 1, 2, 2}.
  h = region_histogram(map, 3, 0, 1);
  CHECK(h.bins[0] == 0.25);
  CHECK(h.bins[1] == 0.25);
  CHECK(h.bins[2] == 0.5);

  map.codes = {0, 0, 1, 0};
  map.width = 2;
  map.height = 2;
  h = region_histogram(map, 0, 0, 1);
  CHECK(h.bins[0] == 0.75);
  CHECK(h.bins[1] == 0.25);

  CHECK_THROWS_AS(region_histogram(map, 10, 10, 2), EmptyRegion);
  CHECK_THROWS_AS(region_histogram(map, 0, 0, -1), InvalidArgument);

  std::mt19937_64 rng(43);
  const GrayImage img = random_gray(30, 30, rng);
  for (const auto& d : {original_lbp(), cs_lbp()}) {
    const CodeMap codes = lbp_image(d, img);
    bool ok = true;
    for (int y = 0; y < codes.height; ++y) {
      for (int x = 0; x < codes.width; ++x) {
        const Histogram rh = region_histogram(codes, x, y, 4);
        ok = ok && rh.size() == d.bin_count() && std::abs(rh.sum() - 1.0) <= 1e-9;
      }
    }
    CHECK(ok);
    CHECK(code_histogram(codes).size() == d.bin_count());
  }
}

TEST_CASE("neighborhood validation") {
  NeighborhoodSpec nb;
  nb.points = 1;
  CHECK_THROWS_AS(nb.validate(), InvalidArgument);
  nb.points = 8;
  nb.radius = 0;
  CHECK_THROWS_AS(nb.validate(), InvalidArgument);
  nb.radius = 1.5;
  CHECK(nb.margin() == 2);
}
