#pragma once

#include <cstdint>
#include <random>

#include "lbpforge/image.hpp"

namespace testing_support {

inline lbpforge::GrayImage random_gray(int w, int h, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> v(0, 255);
  lbpforge::GrayImage img(w, h);
  for (double& p : img.pixels) p = v(rng);
  return img;
}

// Direct 3x3 Original LBP, written independently of the library geometry:
// bit 0 east, then counterclockwise on screen (north is y - 1).
inline std::uint32_t oracle_lbp3x3(const lbpforge::GrayImage& img, int x, int y) {
  static constexpr int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr int dy[8] = {0, -1, -1, -1, 0, 1, 1, 1};
  const double c = img.at(x, y);
  std::uint32_t code = 0;
  for (int p = 0; p < 8; ++p) {
    if (img.at(x + dx[p], y + dy[p]) >= c) code |= 1u << p;
  }
  return code;
}

}  // namespace testing_support
