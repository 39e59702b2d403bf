#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lbpforge/bgs.hpp"
#include "lbpforge/image.hpp"
#include "lbpforge/lbp.hpp"
#include "lbpforge/metrics.hpp"

namespace lbpforge {

/// Decoded frames with paired ground truth. Every frame feeds the background
/// model; only frames in [eval_begin, eval_end) are scored.
struct Scene {
  std::string name;
  std::vector<GrayImage> frames;
  std::vector<LabelImage> ground_truth;
  std::size_t eval_begin = 0;
  std::size_t eval_end = 0;  // 0 means frames.size()
  IgnoreLabels ignore;

  void validate() const;
  std::size_t scored_end() const noexcept { return eval_end == 0 ? frames.size() : eval_end; }
};

struct SceneScore {
  ConfusionCounts counts;
  Score score;
};

using MaskSink = std::function<void(std::size_t frame, const ForegroundMask& mask)>;

/// One full background-subtraction pass of `descriptor` over the scene with
/// counts pooled over the scored frames. Pixels within the LBP margin are
/// not scored.
SceneScore score_descriptor(const LbpDescriptor& descriptor, const Scene& scene, const BgsParams& params,
                            int threads = 0, const MaskSink& sink = {});

/// Mask padded back to frame size (margin pixels background), 0/255.
LabelImage mask_to_frame(const ForegroundMask& mask, int margin, int frame_width, int frame_height);

struct SyntheticSceneSpec {
  int width = 64;
  int height = 64;
  int frames = 60;
  int square = 16;
  int burn_in = 20;
  double noise_sigma = 1.0;
  bool moving_object = true;
  std::uint64_t seed = 1;
};

/// Static random texture plus an optional checkerboard square that enters
/// once burn-in ends. Exact ground truth; gray values are integers.
Scene make_synthetic_scene(const SyntheticSceneSpec& spec);

}  // namespace lbpforge
