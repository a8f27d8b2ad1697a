#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <system_error>

#include "nseg/augment.hpp"
#include "nseg/image.hpp"

namespace fixture {

namespace fs = std::filesystem;

inline nseg::LabelMask random_mask(int w, int h, int classes, std::mt19937_64& gen,
                                   double ignore_fraction = 0.0) {
  nseg::LabelMask m(w, h, classes);
  std::uniform_int_distribution<int> cls(0, classes - 1);
  std::bernoulli_distribution ignore(ignore_fraction);
  for (auto& v : m.values) {
    v = ignore_fraction > 0.0 && ignore(gen) ? nseg::kIgnore : static_cast<std::uint8_t>(cls(gen));
  }
  return m;
}

// Blocky mask: random rectangles painted over a background, so components
// have a realistic spread of sizes.
inline nseg::LabelMask blob_mask(int w, int h, int classes, std::mt19937_64& gen, int rects = 12) {
  nseg::LabelMask m(w, h, classes);
  std::uniform_int_distribution<int> cls(0, classes - 1);
  std::uniform_int_distribution<int> px(0, w - 1);
  std::uniform_int_distribution<int> py(0, h - 1);
  for (int r = 0; r < rects; ++r) {
    const int x0 = px(gen), y0 = py(gen);
    const int x1 = std::min(w, x0 + 1 + px(gen) / 3), y1 = std::min(h, y0 + 1 + py(gen) / 3);
    const auto c = static_cast<std::uint8_t>(cls(gen));
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) m.at(x, y) = c;
  }
  return m;
}

inline nseg::ImagePlane random_image(int w, int h, int channels, std::mt19937_64& gen) {
  nseg::ImagePlane img(w, h, channels);
  std::uniform_int_distribution<int> s(0, 255);
  for (auto& v : img.samples) v = static_cast<std::uint8_t>(s(gen));
  return img;
}

// Horizontal-plus-vertical gradient, distinct in every pixel for w, h <= 16.
inline nseg::ImagePlane ramp_image(int w, int h, int channels = 1) {
  nseg::ImagePlane img(w, h, channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c)
        img.pixel(x, y)[static_cast<std::size_t>(c)] =
            static_cast<std::uint8_t>((x * 16 + y + 40 * c) % 256);
  return img;
}

inline nseg::SamplePair random_sample(int w, int h, int classes, std::mt19937_64& gen,
                                      std::int64_t id = 0, std::int64_t epoch = 0) {
  return {random_image(w, h, 3, gen), blob_mask(w, h, classes, gen), id, epoch};
}

// Scoped scratch directory under the system temp path.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("nseg_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& child) const { return path_ / child; }

 private:
  fs::path path_;
};

inline std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Relative path -> bytes for every regular file under `root`.
inline std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_bytes(e.path());
  }
  return out;
}

}  // namespace fixture
