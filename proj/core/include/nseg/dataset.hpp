#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nseg/augment.hpp"
#include "nseg/image.hpp"

namespace nseg {

// ---------------------------------------------------------------------------
// Tiling

/// snap: add windows flush with the right/bottom edge when the stride grid
/// does not reach it. drop: keep only stride-grid windows.
enum class EdgePolicy { snap, drop };

struct TilingSpec {
  int tile = 512;
  int stride = 256;
  EdgePolicy edge = EdgePolicy::snap;

  /// Throws InvalidParameter unless 1 <= stride <= tile.
  void validate() const;
};

struct TileOrigin {
  int x = 0;
  int y = 0;

  friend bool operator==(const TileOrigin&, const TileOrigin&) = default;
};

/// Window origins in row-major order (y outer, x inner), deduplicated.
/// A tile that does not fit with edge=drop yields no windows; with edge=snap
/// it is an InvalidInput error.
std::vector<TileOrigin> tile_origins(int width, int height, const TilingSpec& spec);

/// Crops of `sample` at tile_origins(); pure windowing, no resampling.
std::vector<SamplePair> tile_pair(const SamplePair& sample, const TilingSpec& spec);

// ---------------------------------------------------------------------------
// Class handling

/// Source index -> dense target index or kIgnore. kIgnore always maps to
/// itself; source values without an entry are data errors.
class ClassMap {
 public:
  ClassMap() = default;

  /// Maps 0..classes-1 onto themselves.
  static ClassMap identity(int classes);

  /// Comma-separated targets listed by source index, e.g. "0,1,2,3,4,ignore"
  /// drops source class 5 (clutter) and keeps the rest.
  static ClassMap parse(std::string_view text);

  void set(std::uint8_t source, std::uint8_t target);
  [[nodiscard]] std::optional<std::uint8_t> lookup(std::uint8_t source) const;

  /// Number of dense target classes (max target + 1).
  [[nodiscard]] int target_classes() const;

  /// Throws InvalidParameter unless targets form 0..C-1 (plus ignore).
  void validate() const;

  std::vector<std::string> class_names;

 private:
  std::array<int, 256> table_ = make_empty();
  static std::array<int, 256> make_empty();
};

/// Values replaced per the table; ignore passes through. Throws DataError
/// naming the first unmapped value.
LabelMask remap_classes(const LabelMask& mask, const ClassMap& map);

/// RGB colour -> source class index, for colour-coded mask files.
struct Palette {
  struct Entry {
    std::array<std::uint8_t, 3> rgb{};
    std::uint8_t index = 0;
  };
  std::vector<Entry> entries;

  /// JSON: {"colors": [{"rgb": [r, g, b], "index": i}, ...]}
  static Palette load(const std::filesystem::path& path);
  static Palette parse_json(std::string_view text);
};

/// Converts an RGB(A) image to class indices. Unknown colours are DataErrors.
LabelMask decode_palette_mask(const ImagePlane& rgb, const Palette& palette);

// ---------------------------------------------------------------------------
// Ingest

struct ManifestEntry {
  std::filesystem::path image_path;
  std::filesystem::path mask_path;
  int width = 0;
  int height = 0;
};

enum class Split { train, test };

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  Split split = Split::train;
};

/// One pair per line, image and mask path separated by a tab. Relative
/// paths resolve against the manifest's directory. Blank lines and lines
/// starting with '#' are skipped. Dimensions are read from the PNG headers
/// and must agree.
DatasetManifest read_manifest(const std::filesystem::path& path, Split split = Split::train);

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Pairs every *.png in `image_dir` with the same-named file in `mask_dir`,
/// sorted by file name. Missing partners are DataErrors.
DatasetManifest scan_pairs(const std::filesystem::path& image_dir,
                           const std::filesystem::path& mask_dir, Split split = Split::train);

struct LoadOptions {
  const Palette* palette = nullptr;    // required for RGB masks
  const ClassMap* class_map = nullptr;  // applied after decoding
  std::optional<int> classes;           // class count when no map is given
};

/// Decodes and validates a mask file on its own.
LabelMask load_mask(const std::filesystem::path& mask_path, const LoadOptions& options = {});

/// Decodes an image/mask pair and validates dimensions and class values.
SamplePair load_pair(const std::filesystem::path& image_path,
                     const std::filesystem::path& mask_path, const LoadOptions& options = {});

}  // namespace nseg
