#include "lbpforge/image.hpp"

#include <string>

#include "lbpforge/errors.hpp"

namespace lbpforge {

LabelImage LabelImage::crop(int x0, int y0, int w, int h) const {
  if (x0 < 0 || y0 < 0 || w < 0 || h < 0 || x0 + w > width || y0 + h > height) {
    throw OutOfBounds("crop " + std::to_string(w) + "x" + std::to_string(h) + "+" + std::to_string(x0) + "+" +
                      std::to_string(y0) + " exceeds " + std::to_string(width) + "x" + std::to_string(height));
  }
  LabelImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(x, y) = at(x0 + x, y0 + y);
  }
  return out;
}

}  // namespace lbpforge
