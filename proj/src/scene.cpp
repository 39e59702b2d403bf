#include "lbpforge/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lbpforge/errors.hpp"

namespace lbpforge {

void Scene::validate() const {
  if (frames.empty()) throw EmptyInput("scene '" + name + "' has no frames");
  if (ground_truth.size() != frames.size()) {
    throw PairMismatch("scene '" + name + "' has " + std::to_string(frames.size()) + " frames but " +
                       std::to_string(ground_truth.size()) + " ground-truth images");
  }
  const int w = frames.front().width;
  const int h = frames.front().height;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].width != w || frames[i].height != h || ground_truth[i].width != w || ground_truth[i].height != h) {
      throw DimensionMismatch("scene '" + name + "' frame " + std::to_string(i) + " differs in size");
    }
  }
  if (eval_begin >= scored_end() || scored_end() > frames.size()) {
    throw InvalidArgument("scene '" + name + "' has an empty or out-of-range scored interval");
  }
}

SceneScore score_descriptor(const LbpDescriptor& descriptor, const Scene& scene, const BgsParams& params, int threads,
                            const MaskSink& sink) {
  scene.validate();
  const int w = scene.frames.front().width;
  const int h = scene.frames.front().height;
  BackgroundModel model(descriptor, params, w, h);
  const int m = model.margin();
  SceneScore out;
  const std::size_t end = scene.scored_end();
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    const ForegroundMask mask = model.process_frame(scene.frames[i], threads);
    if (sink) sink(i, mask);
    if (i < scene.eval_begin || i >= end) continue;
    const LabelImage gt = scene.ground_truth[i].crop(m, m, model.width(), model.height());
    out.counts += confusion(mask, gt, scene.ignore);
  }
  out.score = score(out.counts);
  return out;
}

LabelImage mask_to_frame(const ForegroundMask& mask, int margin, int frame_width, int frame_height) {
  if (mask.width + 2 * margin != frame_width || mask.height + 2 * margin != frame_height) {
    throw DimensionMismatch("mask does not fit the frame with the given margin");
  }
  LabelImage out(frame_width, frame_height, 0);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) out.at(x + margin, y + margin) = mask.at(x, y) ? 255 : 0;
  }
  return out;
}

Scene make_synthetic_scene(const SyntheticSceneSpec& spec) {
  if (spec.width < 8 || spec.height < 8 || spec.frames < 1) throw InvalidArgument("synthetic scene is too small");
  if (spec.moving_object && (spec.square < 2 || spec.square + 8 > std::min(spec.width, spec.height))) {
    throw InvalidArgument("square does not fit the synthetic frame");
  }
  if (spec.burn_in < 0 || spec.burn_in >= spec.frames) throw InvalidArgument("burn-in must be shorter than the scene");

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> texture(20, 235);
  GrayImage background(spec.width, spec.height);
  for (double& v : background.pixels) v = texture(rng);

  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  const int travel_x = spec.width - spec.square - 8;
  const int travel_y = spec.height - spec.square - 8;

  Scene scene;
  scene.name = spec.moving_object ? "synthetic" : "synthetic-static";
  scene.eval_begin = static_cast<std::size_t>(spec.burn_in);
  for (int t = 0; t < spec.frames; ++t) {
    GrayImage frame = background;
    LabelImage gt(spec.width, spec.height, 0);
    if (spec.moving_object && t >= spec.burn_in) {
      // Enters after burn-in, then sweeps a diagonal as a triangle wave at about one pixel per frame.
      const int period = 2 * travel_x;
      const int phase = (t - spec.burn_in) % period;
      const int ox = 4 + (phase < travel_x ? phase : period - phase);
      const int oy = 4 + (ox - 4) * travel_y / travel_x;
      for (int y = 0; y < spec.square; ++y) {
        for (int x = 0; x < spec.square; ++x) {
          const bool dark = ((x / 2) + (y / 2)) % 2 == 0;
          frame.at(ox + x, oy + y) = dark ? 60.0 : 200.0;
          gt.at(ox + x, oy + y) = 255;
        }
      }
    }
    if (spec.noise_sigma > 0.0) {
      for (double& v : frame.pixels) v = std::clamp(std::round(v + noise(rng)), 0.0, 255.0);
    }
    scene.frames.push_back(std::move(frame));
    scene.ground_truth.push_back(std::move(gt));
  }
  return scene;
}

}  // namespace lbpforge
