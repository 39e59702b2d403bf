#include "lbpforge/lbp.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "lbpforge/errors.hpp"
#include "lbpforge/parallel.hpp"

namespace lbpforge {

namespace {

constexpr int kMaxPoints = 16;
// Interpolation weights are snapped to multiples of 2^-16 so that bilinear
// samples of integer images are computed exactly.
constexpr double kWeightScale = 65536.0;

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

}  // namespace

void NeighborhoodSpec::validate() const {
  if (points < 2 || points > kMaxPoints) {
    throw InvalidArgument("neighbor count P must lie in [2, " + std::to_string(kMaxPoints) + "]");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("radius R must be > 0");
}

int NeighborhoodSpec::margin() const { return static_cast<int>(std::ceil(radius - 1e-9)); }

void LbpDescriptor::validate() const {
  neighborhood.validate();
  if (!std::isfinite(a)) throw InvalidArgument("offset a must be finite");
  if (variant == DescriptorVariant::CenterSymmetric && neighborhood.points % 2 != 0) {
    throw InvalidArgument("center-symmetric LBP needs an even neighbor count");
  }
}

std::uint32_t LbpDescriptor::bin_count() const {
  const int bits = variant == DescriptorVariant::CenterSymmetric ? neighborhood.points / 2 : neighborhood.points;
  return std::uint32_t{1} << bits;
}

std::string LbpDescriptor::name() const {
  if (variant == DescriptorVariant::CenterSymmetric) return "CS-LBP";
  return render(expression);
}

LbpDescriptor original_lbp(NeighborhoodSpec nb) {
  LbpDescriptor d;
  d.expression = parse("g_p - g_c");
  d.neighborhood = nb;
  return d;
}

LbpDescriptor modified_lbp(double a, NeighborhoodSpec nb) {
  LbpDescriptor d;
  d.expression = parse("(g_p - g_c) + a");
  d.a = a;
  d.neighborhood = nb;
  return d;
}

LbpDescriptor cs_lbp(double threshold, NeighborhoodSpec nb) {
  LbpDescriptor d;
  d.variant = DescriptorVariant::CenterSymmetric;
  d.cs_threshold = threshold;
  d.neighborhood = nb;
  return d;
}

LbpDescriptor equation_descriptor(Expression e, double a, NeighborhoodSpec nb) {
  LbpDescriptor d;
  d.expression = std::move(e);
  d.a = a;
  d.neighborhood = nb;
  return d;
}

std::vector<NeighborTap> neighbor_taps(const NeighborhoodSpec& spec) {
  spec.validate();
  std::vector<NeighborTap> taps(static_cast<std::size_t>(spec.points));
  for (int p = 0; p < spec.points; ++p) {
    const double theta = 2.0 * std::numbers::pi * p / spec.points;
    const double fx = snap(spec.radius * std::cos(theta));
    const double fy = snap(-spec.radius * std::sin(theta));
    NeighborTap& t = taps[static_cast<std::size_t>(p)];
    if (spec.sampling == Sampling::Nearest) {
      t.dx0 = t.dx1 = static_cast<int>(std::lround(fx));
      t.dy0 = t.dy1 = static_cast<int>(std::lround(fy));
      continue;
    }
    const double x0 = std::floor(fx);
    const double y0 = std::floor(fy);
    t.tx = std::round((fx - x0) * kWeightScale) / kWeightScale;
    t.ty = std::round((fy - y0) * kWeightScale) / kWeightScale;
    t.dx0 = static_cast<int>(x0);
    t.dy0 = static_cast<int>(y0);
    if (t.tx >= 1.0) {
      t.dx0 += 1;
      t.tx = 0.0;
    }
    if (t.ty >= 1.0) {
      t.dy0 += 1;
      t.ty = 0.0;
    }
    t.dx1 = t.tx > 0.0 ? t.dx0 + 1 : t.dx0;
    t.dy1 = t.ty > 0.0 ? t.dy0 + 1 : t.dy0;
  }
  return taps;
}

double sample_tap(const GrayImage& img, int x_c, int y_c, const NeighborTap& t) noexcept {
  const double i00 = img.at(x_c + t.dx0, y_c + t.dy0);
  if (t.tx == 0.0 && t.ty == 0.0) return i00;
  const double i10 = img.at(x_c + t.dx1, y_c + t.dy0);
  const double i01 = img.at(x_c + t.dx0, y_c + t.dy1);
  const double i11 = img.at(x_c + t.dx1, y_c + t.dy1);
  const double top = (1.0 - t.tx) * i00 + t.tx * i10;
  const double bottom = (1.0 - t.tx) * i01 + t.tx * i11;
  return (1.0 - t.ty) * top + t.ty * bottom;
}

namespace {

void check_interior(const GrayImage& img, int x_c, int y_c, int m) {
  if (x_c < m || y_c < m || x_c >= img.width - m || y_c >= img.height - m) {
    throw OutOfBounds("pixel (" + std::to_string(x_c) + ", " + std::to_string(y_c) + ") is within " +
                      std::to_string(m) + " px of the border of a " + std::to_string(img.width) + "x" +
                      std::to_string(img.height) + " image");
  }
}

std::uint32_t cs_code(const double* g, int points, double threshold) noexcept {
  std::uint32_t code = 0;
  const int half = points / 2;
  for (int i = 0; i < half; ++i) {
    const double diff = (g[i] - g[i + half]) / 255.0;
    if (diff > threshold) code |= std::uint32_t{1} << i;
  }
  return code;
}

}  // namespace

std::vector<double> sample_neighbors(const GrayImage& img, int x_c, int y_c, const NeighborhoodSpec& spec) {
  const auto taps = neighbor_taps(spec);
  check_interior(img, x_c, y_c, spec.margin());
  std::vector<double> out;
  out.reserve(taps.size());
  for (const auto& t : taps) out.push_back(sample_tap(img, x_c, y_c, t));
  return out;
}

std::uint32_t lbp_code(const LbpDescriptor& d, const GrayImage& img, int x_c, int y_c) {
  d.validate();
  const auto g = sample_neighbors(img, x_c, y_c, d.neighborhood);
  if (d.variant == DescriptorVariant::CenterSymmetric) return cs_code(g.data(), d.neighborhood.points, d.cs_threshold);
  const double g_c = img.at(x_c, y_c);
  std::uint32_t code = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (evaluate(d.expression, g[p], g_c, d.a) >= 0.0) code |= std::uint32_t{1} << p;
  }
  return code;
}

namespace {

CodeMap empty_code_map(const LbpDescriptor& d, const GrayImage& img) {
  d.validate();
  const int m = d.neighborhood.margin();
  if (img.width < 2 * m + 1 || img.height < 2 * m + 1) {
    throw ImageTooSmall("image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                        " is smaller than the " + std::to_string(2 * m + 1) + " px LBP footprint");
  }
  CodeMap map;
  map.margin = m;
  map.width = img.width - 2 * m;
  map.height = img.height - 2 * m;
  map.bins = d.bin_count();
  map.codes.assign(static_cast<std::size_t>(map.width) * map.height, 0);
  return map;
}

}  // namespace

CodeMap lbp_image(const LbpDescriptor& d, const GrayImage& img, int threads) {
  CodeMap map = empty_code_map(d, img);
  const auto taps = neighbor_taps(d.neighborhood);
  const CompiledExpr f(d.expression);
  const int points = d.neighborhood.points;
  const bool symmetric = d.variant == DescriptorVariant::CenterSymmetric;
  const int m = map.margin;
  const int n_threads = resolve_workers(threads);

#pragma omp parallel for num_threads(n_threads) schedule(static)
  for (int y = 0; y < map.height; ++y) {
    double g[kMaxPoints];
    for (int x = 0; x < map.width; ++x) {
      const int xc = x + m;
      const int yc = y + m;
      for (int p = 0; p < points; ++p) g[p] = sample_tap(img, xc, yc, taps[static_cast<std::size_t>(p)]);
      std::uint32_t code = 0;
      if (symmetric) {
        code = cs_code(g, points, d.cs_threshold);
      } else {
        const double g_c = img.at(xc, yc);
        for (int p = 0; p < points; ++p) {
          if (f(g[p], g_c, d.a) >= 0.0) code |= std::uint32_t{1} << p;
        }
      }
      map.at(x, y) = code;
    }
  }
  return map;
}

CodeMap lbp_image_reference(const LbpDescriptor& d, const GrayImage& img) {
  CodeMap map = empty_code_map(d, img);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) map.at(x, y) = lbp_code(d, img, x + map.margin, y + map.margin);
  }
  return map;
}

double Histogram::sum() const noexcept { return std::accumulate(bins.begin(), bins.end(), 0.0); }

Histogram region_histogram(const CodeMap& codes, int x, int y, int radius) {
  if (radius < 0) throw InvalidArgument("region radius must be >= 0");
  const int x0 = std::max(0, x - radius);
  const int x1 = std::min(codes.width - 1, x + radius);
  const int y0 = std::max(0, y - radius);
  const int y1 = std::min(codes.height - 1, y + radius);
  if (x0 > x1 || y0 > y1) {
    throw EmptyRegion("region around (" + std::to_string(x) + ", " + std::to_string(y) + ") misses the code map");
  }
  Histogram h(codes.bins);
  for (int yy = y0; yy <= y1; ++yy) {
    for (int xx = x0; xx <= x1; ++xx) h.bins[codes.at(xx, yy)] += 1.0;
  }
  const double n = static_cast<double>(x1 - x0 + 1) * (y1 - y0 + 1);
  for (double& b : h.bins) b /= n;
  return h;
}

Histogram code_histogram(const CodeMap& codes) {
  if (codes.codes.empty()) throw EmptyRegion("empty code map");
  Histogram h(codes.bins);
  for (auto c : codes.codes) h.bins[c] += 1.0;
  const double n = static_cast<double>(codes.codes.size());
  for (double& b : h.bins) b /= n;
  return h;
}

}  // namespace lbpforge
