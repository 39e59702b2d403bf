#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lbpforge {

/// Row-major grayscale frame on the raw [0, 255] scale.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const noexcept { return pixels.size(); }
};

/// 8-bit single-channel image: ground-truth labels, or masks as written to
/// disk (0 background, 255 foreground).
struct LabelImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  LabelImage() = default;
  LabelImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  // Sub-rectangle starting at (x0, y0).
  LabelImage crop(int x0, int y0, int w, int h) const;
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {}) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Binary map, 1 = foreground, aligned to the region where codes are defined.
struct ForegroundMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  ForegroundMask() = default;
  ForegroundMask(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const ForegroundMask&, const ForegroundMask&) = default;
};

}  // namespace lbpforge
