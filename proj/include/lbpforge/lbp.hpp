#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lbpforge/expr.hpp"
#include "lbpforge/image.hpp"

namespace lbpforge {

enum class Sampling { Bilinear, Nearest };

/// P neighbors equally spaced on a circle of radius R. Neighbor p sits at
/// angle 2*pi*p/P, counterclockwise from east with image y pointing down:
/// (x_c + R cos t, y_c - R sin t).
struct NeighborhoodSpec {
  int points = 8;
  double radius = 1.0;
  Sampling sampling = Sampling::Bilinear;

  void validate() const;
  int margin() const;  // ceil(R): border width where codes are undefined
};

enum class DescriptorVariant { Generalized, CenterSymmetric };

/// An equation turned into a texture operator. Generalized codes are
/// sum_p s(f(g_p, g_c, a)) 2^p with s(x) = 1 iff x >= 0. The
/// center-symmetric variant ignores the expression and compares opposite
/// neighbors on a [0, 1] intensity scale against cs_threshold.
struct LbpDescriptor {
  Expression expression = parse("g_p - g_c");
  double a = 0.0;
  NeighborhoodSpec neighborhood;
  DescriptorVariant variant = DescriptorVariant::Generalized;
  double cs_threshold = 0.01;

  void validate() const;
  std::uint32_t bin_count() const;  // 2^P, or 2^(P/2) for center-symmetric
  std::string name() const;
};

LbpDescriptor original_lbp(NeighborhoodSpec nb = {});
LbpDescriptor modified_lbp(double a, NeighborhoodSpec nb = {});
LbpDescriptor cs_lbp(double threshold = 0.01, NeighborhoodSpec nb = {});
LbpDescriptor equation_descriptor(Expression e, double a, NeighborhoodSpec nb = {});

/// Per-neighbor sampling recipe, relative to the center pixel. Shared by the
/// reference path and the kernels so both interpolate identically.
struct NeighborTap {
  int dx0 = 0, dy0 = 0, dx1 = 0, dy1 = 0;
  double tx = 0.0, ty = 0.0;
};

std::vector<NeighborTap> neighbor_taps(const NeighborhoodSpec& spec);

double sample_tap(const GrayImage& img, int x_c, int y_c, const NeighborTap& tap) noexcept;

/// The P neighbor gray values of (x_c, y_c). Throws OutOfBounds unless the
/// center is at least ceil(R) from every border.
std::vector<double> sample_neighbors(const GrayImage& img, int x_c, int y_c, const NeighborhoodSpec& spec);

/// Code of one pixel, via tree evaluation. Reference semantics.
std::uint32_t lbp_code(const LbpDescriptor& d, const GrayImage& img, int x_c, int y_c);

/// Codes over the interior; the map is (w - 2m) x (h - 2m) with m = ceil(R)
/// and entry (i, j) belongs to image pixel (i + m, j + m).
struct CodeMap {
  int width = 0;
  int height = 0;
  int margin = 0;
  std::uint32_t bins = 0;
  std::vector<std::uint32_t> codes;

  std::uint32_t at(int x, int y) const { return codes[static_cast<std::size_t>(y) * width + x]; }
  std::uint32_t& at(int x, int y) { return codes[static_cast<std::size_t>(y) * width + x]; }
};

/// Row-parallel kernel (OpenMP). threads <= 0 uses default_workers().
CodeMap lbp_image(const LbpDescriptor& d, const GrayImage& img, int threads = 0);

/// Serial reference: lbp_code() at every interior pixel. Bit-identical to
/// lbp_image().
CodeMap lbp_image_reference(const LbpDescriptor& d, const GrayImage& img);

struct Histogram {
  std::vector<double> bins;

  Histogram() = default;
  explicit Histogram(std::size_t n) : bins(n, 0.0) {}

  std::size_t size() const noexcept { return bins.size(); }
  double sum() const noexcept;
};

/// Normalized histogram of the codes in the (2r+1)^2 window around `center`
/// (code-map coordinates), clipped to the map. Throws EmptyRegion when the
/// clipped window is empty.
Histogram region_histogram(const CodeMap& codes, int x, int y, int radius);

/// Normalized histogram of a whole code map.
Histogram code_histogram(const CodeMap& codes);

}  // namespace lbpforge
