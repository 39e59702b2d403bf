#include "lbpforge/bgs.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "lbpforge/errors.hpp"
#include "lbpforge/parallel.hpp"

namespace lbpforge {

namespace {

// Nonzero bins of a normalized histogram, ascending by bin index.
struct Entry {
  std::uint32_t bin;
  double value;
};

// One pixel's model inside contiguous storage.
struct PixelView {
  double* hist;  // k * bins
  double* weights;
  std::uint8_t* occupied;
  int k;
  std::size_t bins;

  double* slot(int i) const { return hist + static_cast<std::size_t>(i) * bins; }
};

double intersect(const std::vector<Entry>& h, const double* m) noexcept {
  double s = 0.0;
  for (const Entry& e : h) s += std::min(e.value, m[e.bin]);
  return s;
}

// Background order: weight descending, ties by index, shortest prefix whose
// cumulative weight exceeds T_B. Writes indices to `order`, returns length.
int background_order(const double* weights, int k, double threshold, std::vector<int>& order) {
  order.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [weights](int a, int b) { return weights[a] > weights[b]; });
  double cum = 0.0;
  for (int i = 0; i < k; ++i) {
    cum += weights[order[static_cast<std::size_t>(i)]];
    if (cum > threshold) return i + 1;
  }
  return k;
}

bool classify_kernel(const PixelView& v, const std::vector<Entry>& h, const BgsParams& p, std::vector<int>& order) {
  const int n = background_order(v.weights, v.k, p.background_threshold, order);
  for (int i = 0; i < n; ++i) {
    const int b = order[static_cast<std::size_t>(i)];
    if (v.occupied[b] && intersect(h, v.slot(b)) >= p.proximity_threshold) return true;
  }
  return false;
}

void renormalize(double* w, int k) {
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += w[i];
  if (s > 0.0) {
    for (int i = 0; i < k; ++i) w[i] /= s;
  }
}

void update_kernel(const PixelView& v, const std::vector<Entry>& h, const BgsParams& p) {
  int best = -1;
  double best_j = -1.0;
  for (int i = 0; i < v.k; ++i) {
    if (!v.occupied[i]) continue;
    const double j = intersect(h, v.slot(i));
    if (j > best_j) {
      best_j = j;
      best = i;
    }
  }

  if (best < 0 || best_j < p.proximity_threshold) {
    int victim = 0;
    for (int i = 1; i < v.k; ++i) {
      if (v.weights[i] < v.weights[victim]) victim = i;
    }
    double* m = v.slot(victim);
    std::fill(m, m + v.bins, 0.0);
    for (const Entry& e : h) m[e.bin] = e.value;
    v.weights[victim] = p.initial_weight;
    v.occupied[victim] = 1;
    renormalize(v.weights, v.k);
    return;
  }

  double* m = v.slot(best);
  const double keep = 1.0 - p.histogram_rate;
  for (std::size_t i = 0; i < v.bins; ++i) m[i] = keep * m[i];
  for (const Entry& e : h) m[e.bin] += p.histogram_rate * e.value;
  for (int i = 0; i < v.k; ++i) {
    v.weights[i] = (1.0 - p.weight_rate) * v.weights[i] + (i == best ? p.weight_rate : 0.0);
  }
  renormalize(v.weights, v.k);
}

std::vector<Entry> to_entries(const Histogram& h) {
  std::vector<Entry> out;
  for (std::size_t i = 0; i < h.bins.size(); ++i) {
    if (h.bins[i] != 0.0) out.push_back({static_cast<std::uint32_t>(i), h.bins[i]});
  }
  return out;
}

void check_model(const PixelModel& pm, std::size_t bins) {
  const std::size_t k = pm.histograms.size();
  if (k == 0 || pm.weights.size() != k || pm.occupied.size() != k) {
    throw InvalidArgument("pixel model needs K >= 1 histograms with matching weights");
  }
  for (const auto& m : pm.histograms) {
    if (m.size() != bins) throw BinMismatch("model histogram has " + std::to_string(m.size()) + " bins, expected " +
                                            std::to_string(bins));
  }
}

// Copies a PixelModel into flat storage so the shared kernels can run on it.
struct FlatModel {
  std::vector<double> hist;
  std::vector<double> weights;
  std::vector<std::uint8_t> occupied;
  PixelView view;

  FlatModel(const PixelModel& pm, std::size_t bins)
      : weights(pm.weights), occupied(pm.occupied) {
    const int k = static_cast<int>(pm.histograms.size());
    hist.reserve(static_cast<std::size_t>(k) * bins);
    for (const auto& m : pm.histograms) hist.insert(hist.end(), m.bins.begin(), m.bins.end());
    view = PixelView{hist.data(), weights.data(), occupied.data(), k, bins};
  }

  void store(PixelModel& pm) const {
    for (int i = 0; i < view.k; ++i) {
      std::copy_n(view.slot(i), view.bins, pm.histograms[static_cast<std::size_t>(i)].bins.begin());
    }
    pm.weights = weights;
    pm.occupied = occupied;
  }
};

}  // namespace

void BgsParams::validate() const {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (histograms < 1) throw InvalidArgument("K must be >= 1");
  if (!open_unit(proximity_threshold)) throw InvalidArgument("T_P must lie in (0, 1)");
  if (!open_unit(background_threshold)) throw InvalidArgument("T_B must lie in (0, 1)");
  if (!open_unit(histogram_rate)) throw InvalidArgument("alpha_b must lie in (0, 1)");
  if (!open_unit(weight_rate)) throw InvalidArgument("alpha_w must lie in (0, 1)");
  if (!open_unit(initial_weight)) throw InvalidArgument("initial weight must lie in (0, 1)");
  if (region_radius < 0) throw InvalidArgument("region radius must be >= 0");
}

PixelModel PixelModel::empty(int k, std::size_t bins) {
  PixelModel pm;
  pm.histograms.assign(static_cast<std::size_t>(k), Histogram(bins));
  pm.weights.assign(static_cast<std::size_t>(k), 0.0);
  pm.occupied.assign(static_cast<std::size_t>(k), 0);
  return pm;
}

double histogram_intersection(const Histogram& h1, const Histogram& h2) {
  if (h1.size() != h2.size()) {
    throw BinMismatch("histograms have " + std::to_string(h1.size()) + " and " + std::to_string(h2.size()) + " bins");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) s += std::min(h1.bins[i], h2.bins[i]);
  return s;
}

std::vector<int> select_background(std::span<const double> weights, double background_threshold) {
  if (weights.empty()) throw InvalidArgument("select_background needs at least one weight");
  std::vector<int> order;
  const int n = background_order(weights.data(), static_cast<int>(weights.size()), background_threshold, order);
  order.resize(static_cast<std::size_t>(n));
  return order;
}

PixelClass classify_pixel(const PixelModel& pm, const Histogram& h, const BgsParams& params) {
  check_model(pm, h.size());
  FlatModel flat(pm, h.size());
  std::vector<int> order;
  return classify_kernel(flat.view, to_entries(h), params, order) ? PixelClass::Background : PixelClass::Foreground;
}

void update_pixel(PixelModel& pm, const Histogram& h, const BgsParams& params) {
  check_model(pm, h.size());
  FlatModel flat(pm, h.size());
  update_kernel(flat.view, to_entries(h), params);
  flat.store(pm);
}

// ---------------------------------------------------------------------------
// BackgroundModel

BackgroundModel::BackgroundModel(LbpDescriptor descriptor, BgsParams params, int frame_width, int frame_height)
    : descriptor_(std::move(descriptor)), params_(params), frame_width_(frame_width), frame_height_(frame_height) {
  descriptor_.validate();
  params_.validate();
  margin_ = descriptor_.neighborhood.margin();
  width_ = frame_width - 2 * margin_;
  height_ = frame_height - 2 * margin_;
  if (width_ < 1 || height_ < 1) {
    throw ImageTooSmall("frame " + std::to_string(frame_width) + "x" + std::to_string(frame_height) +
                        " has no interior for the LBP footprint");
  }
  bins_ = descriptor_.bin_count();
  const std::size_t pixels = static_cast<std::size_t>(width_) * height_;
  const std::size_t k = static_cast<std::size_t>(params_.histograms);
  constexpr std::size_t kMaxModelBytes = std::size_t{2} << 30;
  if (static_cast<double>(pixels) * k * bins_ * sizeof(double) > static_cast<double>(kMaxModelBytes)) {
    throw InvalidArgument("background model would exceed 2 GiB (" + std::to_string(pixels) + " pixels x " +
                          std::to_string(k) + " histograms x " + std::to_string(bins_) +
                          " bins); reduce P, K, or the frame size");
  }
  histograms_.assign(pixels * k * bins_, 0.0);
  weights_.assign(pixels * k, 0.0);
  occupied_.assign(pixels * k, 0);
}

void BackgroundModel::check_frame(const GrayImage& frame) const {
  if (frame.width != frame_width_ || frame.height != frame_height_) {
    throw DimensionMismatch("frame is " + std::to_string(frame.width) + "x" + std::to_string(frame.height) +
                            ", model expects " + std::to_string(frame_width_) + "x" + std::to_string(frame_height_));
  }
}

void BackgroundModel::process_row(const CodeMap& codes, int y, ForegroundMask& mask) {
  const int r = params_.region_radius;
  const int k = params_.histograms;
  std::vector<std::uint32_t> window;
  window.reserve(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1));
  std::vector<Entry> entries;
  std::vector<int> order;

  const int y0 = std::max(0, y - r);
  const int y1 = std::min(height_ - 1, y + r);
  for (int x = 0; x < width_; ++x) {
    const int x0 = std::max(0, x - r);
    const int x1 = std::min(width_ - 1, x + r);
    window.clear();
    for (int yy = y0; yy <= y1; ++yy) {
      for (int xx = x0; xx <= x1; ++xx) window.push_back(codes.at(xx, yy));
    }
    std::sort(window.begin(), window.end());
    const double n = static_cast<double>(window.size());
    entries.clear();
    for (std::size_t i = 0; i < window.size();) {
      std::size_t j = i;
      while (j < window.size() && window[j] == window[i]) ++j;
      entries.push_back({window[i], static_cast<double>(j - i) / n});
      i = j;
    }

    const std::size_t pix = static_cast<std::size_t>(y) * width_ + x;
    PixelView v{histograms_.data() + pix * k * bins_, weights_.data() + pix * k, occupied_.data() + pix * k, k,
                bins_};
    const bool background = frames_ == 0 || classify_kernel(v, entries, params_, order);
    mask.at(x, y) = background ? 0 : 1;
    update_kernel(v, entries, params_);
  }
}

ForegroundMask BackgroundModel::process_frame(const GrayImage& frame, int threads) {
  check_frame(frame);
  const int n_threads = resolve_workers(threads);
  const CodeMap codes = lbp_image(descriptor_, frame, n_threads);
  ForegroundMask mask(width_, height_);
#pragma omp parallel for num_threads(n_threads) schedule(static)
  for (int y = 0; y < height_; ++y) process_row(codes, y, mask);
  ++frames_;
  return mask;
}

ForegroundMask BackgroundModel::process_frame_reference(const GrayImage& frame) {
  check_frame(frame);
  const CodeMap codes = lbp_image_reference(descriptor_, frame);
  ForegroundMask mask(width_, height_);
  for (int y = 0; y < height_; ++y) process_row(codes, y, mask);
  ++frames_;
  return mask;
}

PixelModel BackgroundModel::pixel(int x, int y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) throw OutOfBounds("pixel outside the model grid");
  const std::size_t k = static_cast<std::size_t>(params_.histograms);
  const std::size_t pix = static_cast<std::size_t>(y) * width_ + x;
  PixelModel pm = PixelModel::empty(params_.histograms, bins_);
  for (std::size_t i = 0; i < k; ++i) {
    const double* src = histograms_.data() + (pix * k + i) * bins_;
    std::copy_n(src, bins_, pm.histograms[i].bins.begin());
    pm.weights[i] = weights_[pix * k + i];
    pm.occupied[i] = occupied_[pix * k + i];
  }
  return pm;
}

}  // namespace lbpforge
