#include "lbpforge/dataset.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lbpforge/errors.hpp"

namespace fs = std::filesystem;

namespace lbpforge {

namespace {

cv::Mat read_raw(const fs::path& path) {
  if (!fs::exists(path)) throw MissingFrame("missing image " + path.string());
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw DecodeError("cannot decode " + path.string());
  if (m.depth() != CV_8U) throw DecodeError(path.string() + " is not an 8-bit image");
  return m;
}

void write_raw(const fs::path& path, const cv::Mat& m) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write " + path.string());
}

bool is_image(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".pgm" || ext == ".bmp" || ext == ".tif" ||
         ext == ".tiff";
}

}  // namespace

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

GrayImage read_gray(const fs::path& path) {
  const cv::Mat m = read_raw(path);
  GrayImage out(m.cols, m.rows);
  const int ch = m.channels();
  if (ch != 1 && ch != 3 && ch != 4) throw DecodeError(path.string() + " has an unsupported channel count");
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) {
      const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * ch;
      // OpenCV stores color as BGR(A).
      out.at(x, y) = ch == 1 ? px[0] : luma(px[2], px[1], px[0]);
    }
  }
  return out;
}

LabelImage read_labels(const fs::path& path) {
  const cv::Mat m = read_raw(path);
  LabelImage out(m.cols, m.rows);
  const int ch = m.channels();
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) out.at(x, y) = row[static_cast<std::ptrdiff_t>(x) * ch];
  }
  return out;
}

void write_labels(const fs::path& path, const LabelImage& img) {
  cv::Mat m(img.height, img.width, CV_8UC1);
  for (int y = 0; y < img.height; ++y) std::copy_n(&img.pixels[static_cast<std::size_t>(y) * img.width], img.width, m.ptr<std::uint8_t>(y));
  write_raw(path, m);
}

void write_gray(const fs::path& path, const GrayImage& img) {
  cv::Mat m(img.height, img.width, CV_8UC1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      m.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(std::clamp(std::lround(img.at(x, y)), 0L, 255L));
    }
  }
  write_raw(path, m);
}

void write_rgb(const fs::path& path, const RgbImage& img) {
  cv::Mat m(img.height, img.width, CV_8UC3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const Rgb& c = img.at(x, y);
      m.at<cv::Vec3b>(y, x) = cv::Vec3b(c.b, c.g, c.r);
    }
  }
  write_raw(path, m);
}

GrayImage downscale_box(const GrayImage& img) {
  GrayImage out((img.width + 1) / 2, (img.height + 1) / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      double sum = 0.0;
      int n = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const int sx = 2 * x + dx;
          const int sy = 2 * y + dy;
          if (sx < img.width && sy < img.height) {
            sum += img.at(sx, sy);
            ++n;
          }
        }
      }
      out.at(x, y) = std::round(sum / n);
    }
  }
  return out;
}

LabelImage downscale_nearest(const LabelImage& img) {
  LabelImage out((img.width + 1) / 2, (img.height + 1) / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) out.at(x, y) = img.at(2 * x, 2 * y);
  }
  return out;
}

std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw MissingFrame("missing directory " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return out;
}

Scene load_scene(const SceneSource& source) {
  const auto inputs = list_images(source.dir / "input");
  const auto truths = list_images(source.dir / "groundtruth");
  if (inputs.empty()) throw MissingFrame("no input frames in " + (source.dir / "input").string());
  if (inputs.size() != truths.size()) {
    throw PairMismatch(std::to_string(inputs.size()) + " input frames but " + std::to_string(truths.size()) +
                       " ground-truth images in " + source.dir.string());
  }
  const int available = static_cast<int>(inputs.size());
  const int first = source.first_frame;
  const int last = source.last_frame == 0 ? available : source.last_frame;
  if (first < 1 || last > available || first > last) {
    throw MissingFrame("frame range [" + std::to_string(first) + ", " + std::to_string(last) + "] is outside the " +
                       std::to_string(available) + " frames of " + source.dir.string());
  }

  int scored_first = first;
  int scored_last = last;
  const fs::path roi = source.dir / "temporalROI.txt";
  if (source.use_temporal_roi && fs::exists(roi)) {
    std::ifstream in(roi);
    int a = 0;
    int b = 0;
    if (!(in >> a >> b)) throw DecodeError("malformed " + roi.string());
    scored_first = std::max(scored_first, a);
    scored_last = std::min(scored_last, b);
  }
  scored_first = std::max(scored_first, first + source.burn_in);
  if (scored_first > scored_last) {
    throw DataError("no scored frames remain in " + source.dir.string() + " after the temporal ROI and burn-in");
  }

  Scene scene;
  scene.name = source.name.empty() ? source.dir.filename().string() : source.name;
  if (scene.name.empty()) scene.name = source.dir.parent_path().filename().string();
  scene.ignore = source.ignore;
  for (int f = first; f <= last; ++f) {
    GrayImage frame = read_gray(inputs[static_cast<std::size_t>(f - 1)]);
    LabelImage gt = read_labels(truths[static_cast<std::size_t>(f - 1)]);
    if (frame.width != gt.width || frame.height != gt.height) {
      throw PairMismatch(inputs[static_cast<std::size_t>(f - 1)].filename().string() + " and " +
                         truths[static_cast<std::size_t>(f - 1)].filename().string() + " differ in size");
    }
    if (source.downscale) {
      frame = downscale_box(frame);
      gt = downscale_nearest(gt);
    }
    scene.frames.push_back(std::move(frame));
    scene.ground_truth.push_back(std::move(gt));
  }
  scene.eval_begin = static_cast<std::size_t>(scored_first - first);
  scene.eval_end = static_cast<std::size_t>(scored_last - first + 1);
  scene.validate();
  return scene;
}

void write_scene(const fs::path& dir, const Scene& scene) {
  scene.validate();
  char name[32];
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    std::snprintf(name, sizeof name, "in%06zu.png", i + 1);
    write_gray(dir / "input" / name, scene.frames[i]);
    std::snprintf(name, sizeof name, "gt%06zu.png", i + 1);
    write_labels(dir / "groundtruth" / name, scene.ground_truth[i]);
  }
  std::ofstream roi(dir / "temporalROI.txt");
  if (!roi) throw IoError("cannot write " + (dir / "temporalROI.txt").string());
  roi << scene.eval_begin + 1 << ' ' << scene.scored_end() << '\n';
}

}  // namespace lbpforge
