#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nseg {

/// Reserved mask value for "no class". Scatter holes and excluded classes
/// are written with it; it never collides with a class index.
inline constexpr std::uint8_t kIgnore = 255;

/// Single-channel class-index grid, row-major. The per-class one-hot view
/// S_j is simply {pixels with value j}.
struct LabelMask {
  int width = 0;
  int height = 0;
  int classes = 1;
  std::vector<std::uint8_t> values;

  LabelMask() = default;
  LabelMask(int w, int h, int num_classes, std::uint8_t fill = 0);

  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] bool empty() const { return values.empty(); }

  std::uint8_t& at(int x, int y) { return values[index(x, y)]; }
  [[nodiscard]] std::uint8_t at(int x, int y) const { return values[index(x, y)]; }

  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }

  /// Throws InvalidInput unless dimensions are consistent, 1 <= classes <= 255
  /// and every non-ignore value is below `classes`.
  void validate() const;

  friend bool operator==(const LabelMask&, const LabelMask&) = default;
};

/// Interleaved 8-bit image, row-major, `channels` samples per pixel.
struct ImagePlane {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> samples;

  ImagePlane() = default;
  ImagePlane(int w, int h, int c, std::uint8_t fill = 0);

  [[nodiscard]] std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  [[nodiscard]] std::span<std::uint8_t> pixel(int x, int y) {
    return {samples.data() + offset(x, y), static_cast<std::size_t>(channels)};
  }
  [[nodiscard]] std::span<const std::uint8_t> pixel(int x, int y) const {
    return {samples.data() + offset(x, y), static_cast<std::size_t>(channels)};
  }

  [[nodiscard]] std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(x)) *
           static_cast<std::size_t>(channels);
  }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;
};

/// Mirror both image and mask along the vertical axis.
LabelMask flip_horizontal(const LabelMask& mask);
ImagePlane flip_horizontal(const ImagePlane& image);

/// Resize to `new_w` x `new_h` using pixel-center alignment. Masks use
/// nearest sampling so class values never mix; images use bilinear.
LabelMask resize_nearest(const LabelMask& mask, int new_w, int new_h);
ImagePlane resize_bilinear(const ImagePlane& image, int new_w, int new_h);

}  // namespace nseg
