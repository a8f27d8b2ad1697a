#include "nseg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nseg/error.hpp"
#include "nseg/png_io.hpp"

namespace nseg {

namespace fs = std::filesystem;

namespace {

std::vector<int> axis_origins(int dim, const TilingSpec& spec, const char* axis) {
  std::vector<int> origins;
  if (spec.tile > dim) {
    if (spec.edge == EdgePolicy::drop) return origins;
    throw InvalidInput(std::string("tile ") + std::to_string(spec.tile) + " does not fit the " +
                       axis + " extent " + std::to_string(dim));
  }
  for (int o = 0; o + spec.tile <= dim; o += spec.stride) origins.push_back(o);
  if (spec.edge == EdgePolicy::snap && origins.back() + spec.tile < dim) {
    origins.push_back(dim - spec.tile);
  }
  return origins;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tiling

void TilingSpec::validate() const {
  if (tile < 1 || stride < 1 || stride > tile) {
    throw InvalidParameter("tiling requires 1 <= stride <= tile, got tile " +
                           std::to_string(tile) + " stride " + std::to_string(stride));
  }
}

std::vector<TileOrigin> tile_origins(int width, int height, const TilingSpec& spec) {
  spec.validate();
  if (width < 1 || height < 1) throw InvalidInput("cannot tile an empty image");
  const auto xs = axis_origins(width, spec, "horizontal");
  const auto ys = axis_origins(height, spec, "vertical");
  std::vector<TileOrigin> out;
  out.reserve(xs.size() * ys.size());
  for (int y : ys) {
    for (int x : xs) out.push_back({x, y});
  }
  return out;
}

std::vector<SamplePair> tile_pair(const SamplePair& sample, const TilingSpec& spec) {
  const int w = sample.mask.width;
  const int h = sample.mask.height;
  if (sample.image.width != w || sample.image.height != h) {
    throw InvalidInput("image and mask dimensions differ");
  }
  const auto origins = tile_origins(w, h, spec);
  const int t = spec.tile;
  const int c = sample.image.channels;

  std::vector<SamplePair> tiles;
  tiles.reserve(origins.size());
  for (const auto& o : origins) {
    SamplePair patch;
    patch.sample_id = sample.sample_id;
    patch.epoch = sample.epoch;
    patch.mask = LabelMask(t, t, sample.mask.classes);
    patch.image = ImagePlane(t, t, c);
    for (int y = 0; y < t; ++y) {
      auto mrow = sample.mask.values.begin() +
                  static_cast<std::ptrdiff_t>(sample.mask.index(o.x, o.y + y));
      std::copy_n(mrow, t, patch.mask.values.begin() +
                               static_cast<std::ptrdiff_t>(patch.mask.index(0, y)));
      auto irow = sample.image.samples.begin() +
                  static_cast<std::ptrdiff_t>(sample.image.offset(o.x, o.y + y));
      std::copy_n(irow, static_cast<std::ptrdiff_t>(t) * c,
                  patch.image.samples.begin() +
                      static_cast<std::ptrdiff_t>(patch.image.offset(0, y)));
    }
    tiles.push_back(std::move(patch));
  }
  return tiles;
}

// ---------------------------------------------------------------------------
// Class handling

std::array<int, 256> ClassMap::make_empty() {
  std::array<int, 256> t{};
  t.fill(-1);
  t[kIgnore] = kIgnore;
  return t;
}

ClassMap ClassMap::identity(int classes) {
  if (classes < 1 || classes > 255) {
    throw InvalidParameter("class count must be in [1, 255], got " + std::to_string(classes));
  }
  ClassMap map;
  for (int i = 0; i < classes; ++i) map.table_[static_cast<std::size_t>(i)] = i;
  return map;
}

ClassMap ClassMap::parse(std::string_view text) {
  ClassMap map;
  int source = 0;
  for (;;) {
    const auto pos = text.find(',');
    const std::string_view item = trim(text.substr(0, pos));
    if (source >= 255) throw InvalidParameter("class map lists more than 255 source classes");
    if (item == "ignore") {
      map.table_[static_cast<std::size_t>(source)] = kIgnore;
    } else {
      int target = -1;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), target);
      if (ec != std::errc() || ptr != item.data() + item.size() || target < 0 || target >= 255) {
        throw InvalidParameter("class map: bad target '" + std::string(item) + "' for source " +
                               std::to_string(source));
      }
      map.table_[static_cast<std::size_t>(source)] = target;
    }
    ++source;
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  map.validate();
  return map;
}

void ClassMap::set(std::uint8_t source, std::uint8_t target) {
  if (source == kIgnore) throw InvalidParameter("the ignore value cannot be remapped");
  table_[source] = target;
}

std::optional<std::uint8_t> ClassMap::lookup(std::uint8_t source) const {
  const int t = table_[source];
  if (t < 0) return std::nullopt;
  return static_cast<std::uint8_t>(t);
}

int ClassMap::target_classes() const {
  int c = 0;
  for (std::size_t s = 0; s < kIgnore; ++s) {
    if (table_[s] >= 0 && table_[s] != kIgnore) c = std::max(c, table_[s] + 1);
  }
  return std::max(c, 1);
}

void ClassMap::validate() const {
  std::array<bool, 256> used{};
  for (std::size_t s = 0; s < kIgnore; ++s) {
    if (table_[s] >= 0 && table_[s] != kIgnore) used[static_cast<std::size_t>(table_[s])] = true;
  }
  const int c = target_classes();
  for (int t = 0; t < c; ++t) {
    if (!used[static_cast<std::size_t>(t)]) {
      throw InvalidParameter("class map targets are not dense: nothing maps to " +
                             std::to_string(t));
    }
  }
}

LabelMask remap_classes(const LabelMask& mask, const ClassMap& map) {
  std::array<int, 256> lut{};
  for (int v = 0; v < 256; ++v) {
    const auto t = map.lookup(static_cast<std::uint8_t>(v));
    lut[static_cast<std::size_t>(v)] = t ? *t : -1;
  }
  LabelMask out = mask;
  out.classes = map.target_classes();
  for (std::uint8_t& v : out.values) {
    const int t = lut[v];
    if (t < 0) throw DataError("mask value " + std::to_string(v) + " has no class map entry");
    v = static_cast<std::uint8_t>(t);
  }
  return out;
}

Palette Palette::parse_json(std::string_view text) {
  Palette palette;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& item : doc.at("colors")) {
      Entry e;
      const auto& rgb = item.at("rgb");
      if (rgb.size() != 3) throw DataError("palette colour must have three components");
      for (std::size_t k = 0; k < 3; ++k) e.rgb[k] = rgb.at(k).get<std::uint8_t>();
      e.index = item.at("index").get<std::uint8_t>();
      palette.entries.push_back(e);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed palette: ") + ex.what());
  }
  return palette;
}

Palette Palette::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open palette '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

LabelMask decode_palette_mask(const ImagePlane& rgb, const Palette& palette) {
  if (rgb.channels < 3) throw InvalidInput("palette decoding needs an RGB image");
  LabelMask mask(rgb.width, rgb.height, 1);
  int max_index = -1;
  for (int y = 0; y < rgb.height; ++y) {
    for (int x = 0; x < rgb.width; ++x) {
      const auto px = rgb.pixel(x, y);
      const auto it = std::find_if(palette.entries.begin(), palette.entries.end(),
                                   [&](const Palette::Entry& e) {
                                     return e.rgb[0] == px[0] && e.rgb[1] == px[1] &&
                                            e.rgb[2] == px[2];
                                   });
      if (it == palette.entries.end()) {
        throw DataError("colour (" + std::to_string(px[0]) + "," + std::to_string(px[1]) + "," +
                        std::to_string(px[2]) + ") at (" + std::to_string(x) + "," +
                        std::to_string(y) + ") is not in the palette");
      }
      mask.at(x, y) = it->index;
      if (it->index != kIgnore) max_index = std::max(max_index, static_cast<int>(it->index));
    }
  }
  mask.classes = std::max(1, max_index + 1);
  return mask;
}

// ---------------------------------------------------------------------------
// Ingest

DatasetManifest read_manifest(const fs::path& path, Split split) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest '" + path.string() + "'");
  const fs::path base = path.parent_path();
  DatasetManifest manifest;
  manifest.split = split;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto tab = text.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected image and mask paths separated by a tab");
    }
    ManifestEntry e;
    e.image_path = fs::path(std::string(trim(text.substr(0, tab))));
    e.mask_path = fs::path(std::string(trim(text.substr(tab + 1))));
    if (e.image_path.is_relative()) e.image_path = base / e.image_path;
    if (e.mask_path.is_relative()) e.mask_path = base / e.mask_path;
    const auto [iw, ih] = png_dimensions(e.image_path);
    const auto [mw, mh] = png_dimensions(e.mask_path);
    if (iw != mw || ih != mh) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": image is " +
                      std::to_string(iw) + "x" + std::to_string(ih) + " but mask is " +
                      std::to_string(mw) + "x" + std::to_string(mh));
    }
    e.width = iw;
    e.height = ih;
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
  const fs::path base = fs::absolute(path).parent_path();
  for (const auto& e : manifest.entries) {
    out << fs::absolute(e.image_path).lexically_proximate(base).generic_string() << '\t'
        << fs::absolute(e.mask_path).lexically_proximate(base).generic_string() << '\n';
  }
  if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
}

DatasetManifest scan_pairs(const fs::path& image_dir, const fs::path& mask_dir, Split split) {
  if (!fs::is_directory(image_dir)) {
    throw DataError("image directory '" + image_dir.string() + "' does not exist");
  }
  if (!fs::is_directory(mask_dir)) {
    throw DataError("mask directory '" + mask_dir.string() + "' does not exist");
  }
  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(image_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      images.push_back(entry.path());
    }
  }
  std::sort(images.begin(), images.end());

  DatasetManifest manifest;
  manifest.split = split;
  for (const auto& image : images) {
    ManifestEntry e;
    e.image_path = image;
    e.mask_path = mask_dir / image.filename();
    if (!fs::exists(e.mask_path)) {
      throw DataError("no mask '" + e.mask_path.string() + "' for image '" + image.string() + "'");
    }
    std::tie(e.width, e.height) = png_dimensions(e.image_path);
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

LabelMask load_mask(const fs::path& mask_path, const LoadOptions& options) {
  const ImagePlane raw = read_png_indices(mask_path);
  LabelMask mask;
  if (raw.channels == 1) {
    mask.width = raw.width;
    mask.height = raw.height;
    mask.values = raw.samples;
    int max_index = -1;
    for (std::uint8_t v : mask.values) {
      if (v != kIgnore) max_index = std::max(max_index, static_cast<int>(v));
    }
    mask.classes = std::max(1, max_index + 1);
  } else if (raw.channels >= 3) {
    if (options.palette == nullptr) {
      throw DataError("'" + mask_path.string() + "' is a colour mask but no palette was given");
    }
    mask = decode_palette_mask(raw, *options.palette);
  } else {
    throw DataError("'" + mask_path.string() + "' is not a single-channel or RGB mask");
  }

  try {
    if (options.class_map != nullptr) {
      mask = remap_classes(mask, *options.class_map);
    } else if (options.classes) {
      mask.classes = *options.classes;
      mask.validate();
    }
  } catch (const std::exception& ex) {
    throw DataError("'" + mask_path.string() + "': " + ex.what());
  }
  return mask;
}

SamplePair load_pair(const fs::path& image_path, const fs::path& mask_path,
                     const LoadOptions& options) {
  SamplePair pair;
  pair.image = read_png(image_path);
  pair.mask = load_mask(mask_path, options);
  if (pair.image.width != pair.mask.width || pair.image.height != pair.mask.height) {
    throw DataError("'" + image_path.string() + "' is " + std::to_string(pair.image.width) + "x" +
                    std::to_string(pair.image.height) + " but its mask is " +
                    std::to_string(pair.mask.width) + "x" + std::to_string(pair.mask.height));
  }
  return pair;
}

}  // namespace nseg
