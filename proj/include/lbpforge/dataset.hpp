#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lbpforge/image.hpp"
#include "lbpforge/metrics.hpp"
#include "lbpforge/scene.hpp"

namespace lbpforge {

// Image codecs (PNG/PGM/JPG/BMP by extension). Color input is converted with
// luma = 0.299 R + 0.587 G + 0.114 B rounded to nearest.
GrayImage read_gray(const std::filesystem::path& path);
LabelImage read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const LabelImage& img);
void write_gray(const std::filesystem::path& path, const GrayImage& img);
void write_rgb(const std::filesystem::path& path, const RgbImage& img);

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// ceil(w/2) x ceil(h/2), each output the rounded mean of its (up to) 2x2 block.
GrayImage downscale_box(const GrayImage& img);
/// ceil(w/2) x ceil(h/2), each output the top-left label of its block.
LabelImage downscale_nearest(const LabelImage& img);

/// A scene in CDnet layout: <dir>/input/*, <dir>/groundtruth/*, and an
/// optional <dir>/temporalROI.txt ("first last", 1-based) narrowing the
/// scored frames.
struct SceneSource {
  std::filesystem::path dir;
  std::string name;      // defaults to the directory name
  int first_frame = 1;   // 1-based, inclusive
  int last_frame = 0;    // 0 = last available
  bool downscale = false;
  bool use_temporal_roi = true;
  int burn_in = 0;       // loaded frames at the start that are not scored
  IgnoreLabels ignore;
};

/// Sorted image files of a directory (lexicographic).
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Throws MissingFrame, PairMismatch, or DecodeError.
Scene load_scene(const SceneSource& source);

/// Writes `scene` in CDnet layout (in%06d.png, gt%06d.png, temporalROI.txt).
void write_scene(const std::filesystem::path& dir, const Scene& scene);

}  // namespace lbpforge
