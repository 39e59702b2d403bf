#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lbpforge/image.hpp"
#include "lbpforge/lbp.hpp"

namespace lbpforge {

/// Texture background-subtraction parameters.
struct BgsParams {
  int histograms = 3;                 // K
  double proximity_threshold = 0.65;  // T_P
  double background_threshold = 0.8;  // T_B
  double histogram_rate = 0.01;       // alpha_b
  double weight_rate = 0.01;          // alpha_w
  int region_radius = 4;              // region is (2r+1)^2
  double initial_weight = 0.01;

  void validate() const;
};

/// K weighted model histograms for one pixel. Unoccupied slots carry weight
/// 0 and never match until they are replaced.
struct PixelModel {
  std::vector<Histogram> histograms;
  std::vector<double> weights;
  std::vector<std::uint8_t> occupied;

  static PixelModel empty(int k, std::size_t bins);
};

/// Sum_i min(h1_i, h2_i). Throws BinMismatch on differing sizes.
double histogram_intersection(const Histogram& h1, const Histogram& h2);

/// Indices sorted by weight (descending, ties by index) truncated to the
/// shortest prefix whose cumulative weight exceeds T_B. Never empty.
std::vector<int> select_background(std::span<const double> weights, double background_threshold);

enum class PixelClass { Background, Foreground };

PixelClass classify_pixel(const PixelModel& pm, const Histogram& h, const BgsParams& params);

/// One model update step; mutates `pm` in place.
void update_pixel(PixelModel& pm, const Histogram& h, const BgsParams& params);

/// Per-pixel background model over the interior of a fixed frame size.
/// Frames must be fed in temporal order. The first frame seeds every pixel
/// and yields an all-background mask.
class BackgroundModel {
 public:
  BackgroundModel(LbpDescriptor descriptor, BgsParams params, int frame_width, int frame_height);

  /// Classifies every pixel against the current model, then updates it.
  /// Pixel rows are processed in parallel; results do not depend on the
  /// thread count.
  ForegroundMask process_frame(const GrayImage& frame, int threads = 0);

  /// Serial reference with the same per-pixel arithmetic.
  ForegroundMask process_frame_reference(const GrayImage& frame);

  PixelModel pixel(int x, int y) const;

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int margin() const noexcept { return margin_; }
  long frames_processed() const noexcept { return frames_; }
  const LbpDescriptor& descriptor() const noexcept { return descriptor_; }
  const BgsParams& params() const noexcept { return params_; }

 private:
  void check_frame(const GrayImage& frame) const;
  void process_row(const CodeMap& codes, int y, ForegroundMask& mask);

  LbpDescriptor descriptor_;
  BgsParams params_;
  int frame_width_ = 0;
  int frame_height_ = 0;
  int width_ = 0;
  int height_ = 0;
  int margin_ = 0;
  std::size_t bins_ = 0;
  long frames_ = 0;
  std::vector<double> histograms_;  // [pixel][k][bin]
  std::vector<double> weights_;     // [pixel][k]
  std::vector<std::uint8_t> occupied_;
};

}  // namespace lbpforge
