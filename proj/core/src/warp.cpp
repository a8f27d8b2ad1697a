#include "nseg/warp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "nseg/error.hpp"

namespace nseg {

namespace {

void check_field(int w, int h, const DisplacementField& field) {
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (field.width != w || field.height != h || field.dx.size() != n || field.dy.size() != n) {
    throw InvalidInput("displacement field is " + std::to_string(field.width) + "x" +
                       std::to_string(field.height) + " but the target is " +
                       std::to_string(w) + "x" + std::to_string(h));
  }
}

// Flat target index of every source pixel under forward mapping.
std::vector<std::size_t> scatter_targets(const DisplacementField& field) {
  const int w = field.width;
  const int h = field.height;
  std::vector<std::size_t> target(field.dx.size());
  std::size_t i = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++i) {
      const int tx = clamp_index(x + field.dx[i], w);
      const int ty = clamp_index(y + field.dy[i], h);
      target[i] = static_cast<std::size_t>(ty) * static_cast<std::size_t>(w) +
                  static_cast<std::size_t>(tx);
    }
  }
  return target;
}

// Flat source index of every output pixel under backward mapping.
std::vector<std::size_t> gather_sources(const DisplacementField& field) {
  const int w = field.width;
  const int h = field.height;
  std::vector<std::size_t> source(field.dx.size());
  std::size_t i = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++i) {
      const int sx = clamp_index(x - field.dx[i], w);
      const int sy = clamp_index(y - field.dy[i], h);
      source[i] = static_cast<std::size_t>(sy) * static_cast<std::size_t>(w) +
                  static_cast<std::size_t>(sx);
    }
  }
  return source;
}

// Multi-source breadth-first fill of unwritten pixels from the nearest
// written one (8-neighbourhood, chessboard distance). Seeds enter the queue in
// row-major order and neighbours are visited in a fixed order, so ties
// resolve deterministically.
void fill_from_nearest(LabelMask& out, const std::vector<bool>& written) {
  const int w = out.width;
  const int h = out.height;
  std::vector<bool> done = written;
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < written.size(); ++i) {
    if (written[i]) queue.push_back(i);
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(i % static_cast<std::size_t>(w));
    const int y = static_cast<int>(i / static_cast<std::size_t>(w));
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t j = out.index(nx, ny);
        if (done[j]) continue;
        done[j] = true;
        out.values[j] = out.values[i];
        queue.push_back(j);
      }
    }
  }
}

std::uint8_t round_sample(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

ImagePlane gather_bilinear(const ImagePlane& image, const DisplacementField& field) {
  const int w = image.width;
  const int h = image.height;
  const int c = image.channels;
  ImagePlane out(w, h, c);
  std::size_t i = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++i) {
      const double fx = std::clamp(x - field.dx[i], 0.0, static_cast<double>(w - 1));
      const double fy = std::clamp(y - field.dy[i], 0.0, static_cast<double>(h - 1));
      const int x0 = static_cast<int>(fx);
      const int y0 = static_cast<int>(fy);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double tx = fx - x0;
      const double ty = fy - y0;
      auto p00 = image.pixel(x0, y0);
      auto p10 = image.pixel(x1, y0);
      auto p01 = image.pixel(x0, y1);
      auto p11 = image.pixel(x1, y1);
      auto dst = out.pixel(x, y);
      for (int k = 0; k < c; ++k) {
        const double top = p00[k] + (p10[k] - p00[k]) * tx;
        const double bottom = p01[k] + (p11[k] - p01[k]) * tx;
        dst[k] = round_sample(top + (bottom - top) * ty);
      }
    }
  }
  return out;
}

}  // namespace

int clamp_index(double v, int dim) {
  if (std::isnan(v)) return 0;
  const double r = std::round(v);
  if (r <= 0.0) return 0;
  const double hi = static_cast<double>(dim - 1);
  if (r >= hi) return dim - 1;
  return static_cast<int>(r);
}

LabelMask warp_label(const LabelMask& mask, const DisplacementField& field,
                     const WarpSpec& spec) {
  check_field(mask.width, mask.height, field);

  if (spec.mapping == Mapping::backward) {
    const std::vector<std::size_t> source = gather_sources(field);
    LabelMask out = mask;
    for (std::size_t i = 0; i < source.size(); ++i) out.values[i] = mask.values[source[i]];
    return out;
  }

  const std::vector<std::size_t> target = scatter_targets(field);
  LabelMask out = mask;
  std::fill(out.values.begin(), out.values.end(), kIgnore);
  std::vector<bool> written(out.size(), false);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const std::uint8_t v = mask.values[i];
    if (v == kIgnore) continue;
    out.values[target[i]] = v;
    written[target[i]] = true;
  }
  if (spec.fill == HoleFill::nearest_source) fill_from_nearest(out, written);
  return out;
}

ImagePlane warp_image(const ImagePlane& image, const DisplacementField& field,
                      const WarpSpec& spec) {
  check_field(image.width, image.height, field);
  const auto c = static_cast<std::size_t>(image.channels);

  if (spec.mapping == Mapping::backward) {
    if (spec.image_interp == Interpolation::bilinear) return gather_bilinear(image, field);
    const std::vector<std::size_t> source = gather_sources(field);
    ImagePlane out = image;
    for (std::size_t i = 0; i < source.size(); ++i) {
      std::copy_n(image.samples.begin() + static_cast<std::ptrdiff_t>(source[i] * c), c,
                  out.samples.begin() + static_cast<std::ptrdiff_t>(i * c));
    }
    return out;
  }

  const std::vector<std::size_t> target = scatter_targets(field);
  ImagePlane out = image;
  std::fill(out.samples.begin(), out.samples.end(), std::uint8_t{0});
  for (std::size_t i = 0; i < target.size(); ++i) {
    std::copy_n(image.samples.begin() + static_cast<std::ptrdiff_t>(i * c), c,
                out.samples.begin() + static_cast<std::ptrdiff_t>(target[i] * c));
  }
  return out;
}

}  // namespace nseg
