#include "commands.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nseg/nseg.hpp"
#include "nseg/parallel.hpp"

namespace nseg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Keys

const std::vector<std::string> kAugmentCoreKeys = {"mode",    "p",      "omega",
                                                   "seed",    "fill",   "mapping",
                                                   "hflip-p", "resize", "image-interp"};
const std::vector<std::string> kLoadKeys = {"palette", "remap", "classes", "class-names"};

const std::vector<std::string> kAugmentKeys = [] {
  std::vector<std::string> k = kAugmentCoreKeys;
  for (const char* extra : {"epochs", "workers", "manifest", "images", "masks", "out", "replay"}) {
    k.emplace_back(extra);
  }
  k.insert(k.end(), kLoadKeys.begin(), kLoadKeys.end());
  return k;
}();

const std::vector<std::string> kPreviewKeys = [] {
  std::vector<std::string> k = {"image", "mask", "grid", "seed", "out", "mapping", "fill"};
  k.insert(k.end(), kLoadKeys.begin(), kLoadKeys.end());
  return k;
}();

const std::vector<std::string> kStatsKeys = [] {
  std::vector<std::string> k = {"masks", "manifest", "report", "bins", "tiny-threshold", "workers"};
  k.insert(k.end(), kLoadKeys.begin(), kLoadKeys.end());
  return k;
}();

const std::vector<std::string> kTileKeys = [] {
  std::vector<std::string> k = {"manifest", "images", "masks", "out",
                                "tile",     "stride", "edge",  "workers"};
  k.insert(k.end(), kLoadKeys.begin(), kLoadKeys.end());
  return k;
}();

const std::map<std::string, std::string> kHelp = {
    {"mode", "label | image | identical (default label)"},
    {"p", "probability of deforming a sample, in [0, 1] (default 0.5)"},
    {"omega", "(alpha, sigma) set: \"1,15,30x3,5\" product or \"1:3;15:5\" pairs"},
    {"seed", "master seed (falls back to NSEG_SEED, then 0)"},
    {"fill", "hole handling: ignore | nearest (default ignore)"},
    {"mapping", "forward | backward (default forward)"},
    {"hflip-p", "horizontal flip probability (default 0)"},
    {"resize", "random resize range lo:hi, e.g. 0.5:2.0 (default none)"},
    {"image-interp", "nearest | bilinear, for backward image warps"},
    {"epochs", "number of epochs to write (default 1)"},
    {"workers", "worker threads (default 1); output does not depend on it"},
    {"manifest", "tab-separated image/mask list"},
    {"images", "image directory (paired with --masks by file name)"},
    {"masks", "mask directory"},
    {"out", "output path"},
    {"replay", "rerun from a provenance.json sidecar"},
    {"palette", "JSON colour palette for RGB masks"},
    {"remap", "class map by source index, e.g. 0,1,2,3,4,ignore"},
    {"classes", "class count when no map is given"},
    {"class-names", "comma-separated class names"},
    {"image", "input image"},
    {"mask", "input mask"},
    {"grid", "(alpha, sigma) grid, same syntax as --omega"},
    {"report", "JSON report path; a .csv is written beside it"},
    {"bins", "area bin lower bounds (default 0,10,100,1000,10000)"},
    {"tiny-threshold", "tiny component area threshold in pixels (default 10)"},
    {"tile", "patch size (default 512)"},
    {"stride", "window stride (default 256)"},
    {"edge", "snap | drop (default snap)"},
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::optional<std::string> get(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) return std::nullopt;
  return it->second;
}

std::string require(const KeyValues& kv, const std::string& key) {
  auto v = get(kv, key);
  if (!v || v->empty()) throw UsageError("missing required option --" + key);
  return *v;
}

long long to_integer(const std::string& key, const std::string& value, long long min_value) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty() || v < min_value) {
    throw UsageError("--" + key + ": expected an integer >= " + std::to_string(min_value) +
                     ", got '" + value + "'");
  }
  return v;
}

int workers_of(const KeyValues& kv) {
  const auto v = get(kv, "workers");
  if (!v) return 1;
  return static_cast<int>(to_integer("workers", *v, 1));
}

KeyValues subset(const KeyValues& kv, const std::vector<std::string>& keys) {
  KeyValues out;
  for (const auto& k : keys) {
    if (auto v = get(kv, k)) out[k] = *v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loading

struct LoadContext {
  std::optional<Palette> palette;
  std::optional<ClassMap> class_map;
  std::optional<int> classes;

  [[nodiscard]] LoadOptions options() const {
    LoadOptions o;
    o.palette = palette ? &*palette : nullptr;
    o.class_map = class_map ? &*class_map : nullptr;
    o.classes = classes;
    return o;
  }
};

LoadContext load_context(const KeyValues& kv) {
  LoadContext ctx;
  if (auto p = get(kv, "palette")) ctx.palette = Palette::load(*p);
  if (auto r = get(kv, "remap")) {
    ctx.class_map = ClassMap::parse(*r);
    if (auto names = get(kv, "class-names")) {
      std::stringstream ss(*names);
      std::string name;
      while (std::getline(ss, name, ',')) ctx.class_map->class_names.push_back(name);
    }
  }
  if (auto c = get(kv, "classes")) ctx.classes = static_cast<int>(to_integer("classes", *c, 1));
  return ctx;
}

DatasetManifest resolve_inputs(const KeyValues& kv) {
  if (auto m = get(kv, "manifest")) return read_manifest(*m);
  const auto images = get(kv, "images");
  const auto masks = get(kv, "masks");
  if (images && masks) return scan_pairs(*images, *masks);
  throw UsageError("inputs required: --manifest FILE or --images DIR --masks DIR");
}

void check_unique_stems(const DatasetManifest& manifest) {
  std::set<std::string> seen;
  for (const auto& e : manifest.entries) {
    const std::string stem = e.image_path.stem().string();
    if (!seen.insert(stem).second) {
      throw UsageError("two inputs share the file stem '" + stem + "'");
    }
  }
}

std::string epoch_dir(std::int64_t epoch) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "epoch_%03lld", static_cast<long long>(epoch));
  return buf;
}

int report_failures(const std::vector<std::string>& failures, std::ostream& err) {
  if (failures.empty()) return 0;
  err << failures.size() << " input(s) failed:\n";
  for (const auto& f : failures) err << "  " << f << '\n';
  return 1;
}

// ---------------------------------------------------------------------------
// Preview rendering

constexpr std::array<std::array<std::uint8_t, 3>, 16> kPalette = {{
    {255, 255, 255}, {0, 0, 255},   {0, 255, 255}, {0, 255, 0},
    {255, 255, 0},   {255, 0, 0},   {128, 0, 128}, {255, 128, 0},
    {0, 128, 128},   {128, 128, 0}, {255, 0, 255}, {0, 0, 128},
    {128, 64, 0},    {64, 128, 255}, {0, 128, 0},  {192, 192, 192},
}};

void draw_overlay(ImagePlane& canvas, int ox, int oy, const ImagePlane& image,
                  const LabelMask& mask) {
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      auto dst = canvas.pixel(ox + x, oy + y);
      const std::uint8_t v = mask.at(x, y);
      if (v == kIgnore) {
        const std::uint8_t g = ((x + y) / 4) % 2 == 0 ? 128 : 80;
        dst[0] = dst[1] = dst[2] = g;
        continue;
      }
      const auto src = image.pixel(x, y);
      const auto color = class_color(v);
      for (int k = 0; k < 3; ++k) {
        const int base = src[image.channels >= 3 ? k : 0];
        dst[k] = static_cast<std::uint8_t>((base + color[k] + 1) / 2);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Provenance

json provenance_inputs(const DatasetManifest& manifest) {
  json inputs = json::array();
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    inputs.push_back({{"id", i},
                      {"stem", e.image_path.stem().string()},
                      {"image", fs::absolute(e.image_path).lexically_normal().string()},
                      {"mask", fs::absolute(e.mask_path).lexically_normal().string()}});
  }
  return inputs;
}

DatasetManifest manifest_from_provenance(const json& doc) {
  DatasetManifest manifest;
  for (const auto& item : doc.at("inputs")) {
    ManifestEntry e;
    e.image_path = item.at("image").get<std::string>();
    e.mask_path = item.at("mask").get<std::string>();
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

}  // namespace

std::array<std::uint8_t, 3> class_color(std::uint8_t c) { return kPalette[c % kPalette.size()]; }

ImagePlane render_preview(const SamplePair& pair, const OmegaSet& grid, std::uint64_t seed,
                          const WarpSpec& warp, std::vector<PreviewCell>* cells) {
  constexpr int kGap = 4;
  const int w = pair.mask.width;
  const int h = pair.mask.height;
  const int panels = static_cast<int>(grid.size()) + 1;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(panels))));
  const int rows = (panels + cols - 1) / cols;
  ImagePlane canvas(cols * w + (cols - 1) * kGap, rows * h + (rows - 1) * kGap, 3, 255);

  auto origin = [&](int k) {
    return std::pair{(k % cols) * (w + kGap), (k / cols) * (h + kGap)};
  };

  auto [x0, y0] = origin(0);
  draw_overlay(canvas, x0, y0, pair.image, pair.mask);
  if (cells) cells->clear();

  for (std::size_t k = 0; k < grid.size(); ++k) {
    RandomStream rng = derive_stream(seed, static_cast<std::int64_t>(k), 0);
    const DisplacementField field = generate_displacement_field(w, h, grid.pairs[k], rng);
    const LabelMask deformed = warp_label(pair.mask, field, warp);
    const auto [ox, oy] = origin(static_cast<int>(k) + 1);
    draw_overlay(canvas, ox, oy, pair.image, deformed);

    if (cells) {
      PreviewCell cell;
      cell.params = grid.pairs[k];
      std::size_t changed = 0;
      for (std::size_t i = 0; i < deformed.size(); ++i) {
        changed += deformed.values[i] != pair.mask.values[i];
      }
      cell.changed_fraction = static_cast<double>(changed) / static_cast<double>(deformed.size());
      for (std::size_t i = 0; i < field.dx.size(); ++i) {
        cell.max_displacement =
            std::max({cell.max_displacement, std::abs(field.dx[i]), std::abs(field.dy[i])});
      }
      cells->push_back(cell);
    }
  }
  return canvas;
}

// ---------------------------------------------------------------------------
// augment

int cmd_augment(const KeyValues& kv_in, std::ostream& out, std::ostream& err) {
  KeyValues kv = kv_in;
  DatasetManifest manifest;
  json load_record = json::object();
  std::int64_t epochs = 1;
  AugmentConfig config;

  if (auto replay = get(kv, "replay")) {
    std::ifstream in(*replay);
    if (!in) throw UsageError("cannot open provenance file '" + *replay + "'");
    const json doc = json::parse(in);
    KeyValues mapping;
    for (const auto& [k, v] : doc.at("config").items()) mapping[k] = v.get<std::string>();
    config = config_from_mapping(mapping);
    epochs = doc.at("epochs").get<std::int64_t>();
    manifest = manifest_from_provenance(doc);
    for (const auto& [k, v] : doc.at("load").items()) kv[k] = v.get<std::string>();
  } else {
    config = config_from_mapping(subset(kv, kAugmentCoreKeys));
    if (auto e = get(kv, "epochs")) epochs = to_integer("epochs", *e, 1);
    manifest = resolve_inputs(kv);
  }
  for (const auto& k : kLoadKeys) {
    if (auto v = get(kv, k)) load_record[k] = *v;
  }

  check_unique_stems(manifest);
  const fs::path out_dir = require(kv, "out");
  const LoadContext ctx = load_context(kv);
  const LoadOptions options = ctx.options();
  const int workers = workers_of(kv);
  const bool write_images = config.mode != AugmentMode::label_only || config.hflip_p > 0.0 ||
                            config.resize.has_value();

  for (std::int64_t e = 0; e < epochs; ++e) {
    fs::create_directories(out_dir / epoch_dir(e) / "masks");
    if (write_images) fs::create_directories(out_dir / epoch_dir(e) / "images");
  }

  const std::size_t n = manifest.entries.size();
  const std::size_t tasks = n * static_cast<std::size_t>(epochs);
  std::vector<AugmentTrace> traces(tasks);
  std::vector<std::string> errors(tasks);

  parallel_for(tasks, workers, [&](std::size_t t) {
    const std::size_t i = t % n;
    const auto epoch = static_cast<std::int64_t>(t / n);
    const ManifestEntry& entry = manifest.entries[i];
    try {
      SamplePair sample = load_pair(entry.image_path, entry.mask_path, options);
      sample.sample_id = static_cast<std::int64_t>(i);
      sample.epoch = epoch;
      const SamplePair result = augment_sample(sample, config, &traces[t]);
      const std::string name = entry.image_path.stem().string() + ".png";
      write_png(out_dir / epoch_dir(epoch) / "masks" / name, result.mask);
      if (write_images) write_png(out_dir / epoch_dir(epoch) / "images" / name, result.image);
    } catch (const std::exception& ex) {
      errors[t] = entry.image_path.string() + " (epoch " + std::to_string(epoch) + "): " + ex.what();
    }
  });

  json samples = json::array();
  std::vector<std::string> failures;
  std::size_t skipped = 0;
  for (std::size_t t = 0; t < tasks; ++t) {
    json s = {{"epoch", t / n}, {"id", t % n}};
    if (!errors[t].empty()) {
      failures.push_back(errors[t]);
      s["deformation"] = "error";
    } else if (traces[t].deformed) {
      s["deformation"] = {{"alpha", traces[t].params.alpha}, {"sigma", traces[t].params.sigma}};
    } else {
      s["deformation"] = "skipped";
      ++skipped;
    }
    s["hflip"] = traces[t].flipped;
    if (traces[t].scale) s["scale"] = *traces[t].scale;
    samples.push_back(std::move(s));
  }

  json doc;
  doc["config"] = config_to_mapping(config);
  doc["epochs"] = epochs;
  doc["load"] = load_record;
  doc["inputs"] = provenance_inputs(manifest);
  doc["samples"] = std::move(samples);
  std::ofstream sidecar(out_dir / "provenance.json", std::ios::binary);
  sidecar << doc.dump(2) << '\n';
  if (!sidecar) throw std::runtime_error("cannot write provenance sidecar");

  out << "augmented " << n << " sample(s) x " << epochs << " epoch(s): "
      << (tasks - skipped - failures.size()) << " deformed, " << skipped << " skipped\n";
  return report_failures(failures, err);
}

// ---------------------------------------------------------------------------
// preview

int cmd_preview(const KeyValues& kv, std::ostream& out, std::ostream&) {
  const LoadContext ctx = load_context(kv);
  const SamplePair pair = load_pair(require(kv, "image"), require(kv, "mask"), ctx.options());
  const OmegaSet grid = OmegaSet::parse(get(kv, "grid").value_or("1,15,30,50,100x3,5,10"));
  KeyValues warp_keys = subset(kv, {"mapping", "fill", "seed"});
  const AugmentConfig config = config_from_mapping(warp_keys);

  std::vector<PreviewCell> cells;
  const ImagePlane panel = render_preview(pair, grid, config.master_seed, config.warp, &cells);
  const fs::path out_path = require(kv, "out");
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_png(out_path, panel);

  out << "panels: " << grid.size() + 1 << '\n';
  for (const auto& c : cells) {
    out << "alpha=" << c.params.alpha << " sigma=" << c.params.sigma
        << " changed_fraction=" << c.changed_fraction
        << " max_displacement=" << c.max_displacement << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// stats

int cmd_stats(const KeyValues& kv, const std::vector<std::string>& split_args, std::ostream& out,
              std::ostream& err) {
  std::vector<std::pair<std::string, std::string>> splits;
  for (const auto& s : split_args) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--split expects NAME=PATH, got '" + s + "'");
    splits.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (auto m = get(kv, "masks")) splits.emplace_back("all", *m);
  else if (auto m = get(kv, "manifest")) splits.emplace_back("all", *m);
  if (splits.empty()) throw UsageError("inputs required: --split NAME=PATH, --masks DIR or --manifest FILE");

  std::vector<std::int64_t> bins = default_area_bins();
  if (auto b = get(kv, "bins")) {
    bins.clear();
    std::stringstream ss(*b);
    std::string item;
    while (std::getline(ss, item, ',')) bins.push_back(to_integer("bins", item, 0));
  }
  std::int64_t threshold = kDefaultTinyThreshold;
  if (auto t = get(kv, "tiny-threshold")) threshold = to_integer("tiny-threshold", *t, 0);

  const LoadContext ctx = load_context(kv);
  const LoadOptions options = ctx.options();
  const int workers = workers_of(kv);

  json doc;
  doc["splits"] = json::object();
  std::string csv = "split,class,bin_lo,bin_hi,count\n";
  std::vector<std::string> failures;

  for (const auto& [name, path] : splits) {
    std::vector<fs::path> masks;
    if (fs::is_directory(path)) {
      for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") masks.push_back(entry.path());
      }
      std::sort(masks.begin(), masks.end());
    } else {
      for (const auto& e : read_manifest(path).entries) masks.push_back(e.mask_path);
    }

    std::vector<AreaReport> partial(masks.size(), AreaReport(bins, threshold));
    std::vector<std::string> errors(masks.size());
    parallel_for(masks.size(), workers, [&](std::size_t i) {
      try {
        partial[i].add(load_mask(masks[i], options));
      } catch (const std::exception& ex) {
        errors[i] = masks[i].string() + ": " + ex.what();
      }
    });
    AreaReport report(bins, threshold);
    for (std::size_t i = 0; i < masks.size(); ++i) {
      if (errors[i].empty()) report.merge(partial[i]);
      else failures.push_back(errors[i]);
    }

    doc["splits"][name] = json::parse(report.to_json());
    std::istringstream rows(report.to_csv());
    std::string row;
    std::getline(rows, row);  // header
    while (std::getline(rows, row)) csv += name + "," + row + "\n";

    char fraction[32];
    std::snprintf(fraction, sizeof fraction, "%.4f", report.tiny_fraction());
    out << "split " << name << ": masks=" << report.mask_count()
        << " components=" << report.total_components() << " tiny_fraction=" << fraction << '\n';
  }

  if (!failures.empty()) return report_failures(failures, err);

  if (auto report_path = get(kv, "report")) {
    const fs::path json_path = *report_path;
    if (json_path.has_parent_path()) fs::create_directories(json_path.parent_path());
    fs::path csv_path = json_path;
    csv_path.replace_extension(".csv");
    std::ofstream(json_path, std::ios::binary) << doc.dump(2) << '\n';
    std::ofstream(csv_path, std::ios::binary) << csv;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// tile

int cmd_tile(const KeyValues& kv, std::ostream& out, std::ostream& err) {
  TilingSpec spec;
  if (auto t = get(kv, "tile")) spec.tile = static_cast<int>(to_integer("tile", *t, 1));
  if (auto s = get(kv, "stride")) spec.stride = static_cast<int>(to_integer("stride", *s, 1));
  if (auto e = get(kv, "edge")) {
    if (*e == "snap") spec.edge = EdgePolicy::snap;
    else if (*e == "drop") spec.edge = EdgePolicy::drop;
    else throw UsageError("--edge: expected snap or drop, got '" + *e + "'");
  }
  spec.validate();

  const DatasetManifest manifest = resolve_inputs(kv);
  check_unique_stems(manifest);
  const fs::path out_dir = require(kv, "out");
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "masks");
  const LoadContext ctx = load_context(kv);
  const LoadOptions options = ctx.options();

  const std::size_t n = manifest.entries.size();
  std::vector<std::vector<ManifestEntry>> produced(n);
  std::vector<std::string> errors(n);
  parallel_for(n, workers_of(kv), [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    try {
      const SamplePair pair = load_pair(entry.image_path, entry.mask_path, options);
      const auto origins = tile_origins(pair.mask.width, pair.mask.height, spec);
      const auto tiles = tile_pair(pair, spec);
      const std::string stem = entry.image_path.stem().string();
      for (std::size_t k = 0; k < tiles.size(); ++k) {
        const std::string name = stem + "_x" + std::to_string(origins[k].x) + "_y" +
                                 std::to_string(origins[k].y) + ".png";
        ManifestEntry e{out_dir / "images" / name, out_dir / "masks" / name, spec.tile, spec.tile};
        write_png(e.image_path, tiles[k].image);
        write_png(e.mask_path, tiles[k].mask);
        produced[i].push_back(std::move(e));
      }
    } catch (const std::exception& ex) {
      errors[i] = entry.image_path.string() + ": " + ex.what();
    }
  });

  DatasetManifest tiled;
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) failures.push_back(errors[i]);
    for (auto& e : produced[i]) tiled.entries.push_back(std::move(e));
  }
  write_manifest(out_dir / "manifest.txt", tiled);
  out << "wrote " << tiled.entries.size() << " patch(es) from " << n << " input(s)\n";
  return report_failures(failures, err);
}

// ---------------------------------------------------------------------------
// Dispatch

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Label-only elastic deformation augmentation for segmentation datasets",
               "nsegment"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "TOML-style experiment file; flags override it");

  struct Sub {
    CLI::App* app;
    const std::vector<std::string>* keys;
  };
  std::map<std::string, std::string> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  std::vector<std::string> split_args;

  auto make_sub = [&](const char* name, const char* help, const std::vector<std::string>& keys) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    for (const auto& key : keys) {
      options[name][key] = sub->add_option("--" + key, values[std::string(name) + "." + key],
                                             kHelp.at(key));
    }
    return Sub{sub, &keys};
  };

  const Sub augment = make_sub("augment", "Augment masks (and images) for one or more epochs",
                               kAugmentKeys);
  const Sub preview = make_sub("preview", "Render a deformation preview panel", kPreviewKeys);
  const Sub stats = make_sub("stats", "Connected-component area report", kStatsKeys);
  stats.app->add_option("--split", split_args, "NAME=PATH (mask directory or manifest)");
  const Sub tile = make_sub("tile", "Cut large pairs into fixed-size patches", kTileKeys);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    KeyValues file_kv;
    if (!config_path.empty()) {
      try {
        file_kv = read_config_file(config_path);
      } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
      }
    }
    std::set<std::string> known;
    for (const auto* keys : {&kAugmentKeys, &kPreviewKeys, &kStatsKeys, &kTileKeys}) {
      known.insert(keys->begin(), keys->end());
    }
    for (const auto& [k, v] : file_kv) {
      if (!known.contains(k)) throw UsageError("unknown configuration key '" + k + "'");
    }

    for (const Sub& sub : {augment, preview, stats, tile}) {
      if (!sub.app->parsed()) continue;
      const std::string name = sub.app->get_name();
      KeyValues kv = subset(file_kv, *sub.keys);
      for (const auto& key : *sub.keys) {
        if (options[name][key]->count() > 0) kv[key] = values[name + "." + key];
      }
      if ((name == "augment" || name == "preview") && !kv.contains("seed")) {
        if (const char* env = std::getenv("NSEG_SEED"); env != nullptr && *env != '\0') {
          kv["seed"] = env;
        }
      }
      if (name == "augment") return cmd_augment(kv, out, err);
      if (name == "preview") return cmd_preview(kv, out, err);
      if (name == "stats") return cmd_stats(kv, split_args, out, err);
      return cmd_tile(kv, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace nseg::cli
