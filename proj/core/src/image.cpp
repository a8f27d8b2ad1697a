#include "nseg/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nseg/error.hpp"

namespace nseg {

namespace {

void check_dims(int w, int h) {
  if (w < 1 || h < 1) {
    throw InvalidParameter("image dimensions must be positive, got " + std::to_string(w) +
                           "x" + std::to_string(h));
  }
}

std::size_t area(int w, int h) {
  return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
}

// Source coordinate of destination pixel center `i` when scaling `src` -> `dst`.
double source_center(int i, int src, int dst) {
  return (static_cast<double>(i) + 0.5) * static_cast<double>(src) / static_cast<double>(dst) -
         0.5;
}

}  // namespace

LabelMask::LabelMask(int w, int h, int num_classes, std::uint8_t fill)
    : width(w), height(h), classes(num_classes), values(area(w, h), fill) {
  check_dims(w, h);
}

void LabelMask::validate() const {
  if (width < 1 || height < 1 || values.size() != area(width, height)) {
    throw InvalidInput("label mask storage does not match its dimensions");
  }
  if (classes < 1 || classes > 255) {
    throw InvalidInput("label mask class count must be in [1, 255], got " +
                       std::to_string(classes));
  }
  for (std::uint8_t v : values) {
    if (v != kIgnore && v >= classes) {
      throw InvalidInput("label value " + std::to_string(v) + " is not below class count " +
                         std::to_string(classes));
    }
  }
}

ImagePlane::ImagePlane(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c), samples(area(w, h) * static_cast<std::size_t>(c), fill) {
  check_dims(w, h);
  if (c < 1) throw InvalidParameter("image must have at least one channel");
}

LabelMask flip_horizontal(const LabelMask& mask) {
  LabelMask out = mask;
  for (int y = 0; y < mask.height; ++y) {
    auto row = out.values.begin() + static_cast<std::ptrdiff_t>(mask.index(0, y));
    std::reverse(row, row + mask.width);
  }
  return out;
}

ImagePlane flip_horizontal(const ImagePlane& image) {
  ImagePlane out = image;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      auto src = image.pixel(image.width - 1 - x, y);
      std::copy(src.begin(), src.end(), out.pixel(x, y).begin());
    }
  }
  return out;
}

LabelMask resize_nearest(const LabelMask& mask, int new_w, int new_h) {
  LabelMask out(new_w, new_h, mask.classes);
  std::vector<int> xs(static_cast<std::size_t>(new_w));
  for (int x = 0; x < new_w; ++x) {
    const double sx = std::floor(source_center(x, mask.width, new_w) + 0.5);
    xs[static_cast<std::size_t>(x)] = std::clamp(static_cast<int>(sx), 0, mask.width - 1);
  }
  for (int y = 0; y < new_h; ++y) {
    const double sy = std::floor(source_center(y, mask.height, new_h) + 0.5);
    const int src_y = std::clamp(static_cast<int>(sy), 0, mask.height - 1);
    for (int x = 0; x < new_w; ++x) {
      out.at(x, y) = mask.at(xs[static_cast<std::size_t>(x)], src_y);
    }
  }
  return out;
}

ImagePlane resize_bilinear(const ImagePlane& image, int new_w, int new_h) {
  ImagePlane out(new_w, new_h, image.channels);
  const int c = image.channels;
  for (int y = 0; y < new_h; ++y) {
    const double fy = std::clamp(source_center(y, image.height, new_h), 0.0,
                                 static_cast<double>(image.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double ty = fy - y0;
    for (int x = 0; x < new_w; ++x) {
      const double fx = std::clamp(source_center(x, image.width, new_w), 0.0,
                                   static_cast<double>(image.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double tx = fx - x0;
      auto p00 = image.pixel(x0, y0);
      auto p10 = image.pixel(x1, y0);
      auto p01 = image.pixel(x0, y1);
      auto p11 = image.pixel(x1, y1);
      auto dst = out.pixel(x, y);
      for (int k = 0; k < c; ++k) {
        const double top = p00[k] + (p10[k] - p00[k]) * tx;
        const double bottom = p01[k] + (p11[k] - p01[k]) * tx;
        const double v = top + (bottom - top) * ty;
        dst[k] = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

}  // namespace nseg
