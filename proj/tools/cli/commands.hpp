#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "config_file.hpp"
#include "nseg/augment.hpp"
#include "nseg/image.hpp"

namespace nseg::cli {

/// Entry point shared by main() and the tests. `args` excludes the program
/// name. Returns 0 on success, 1 on runtime failure and 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Subcommands operate on the merged key/value view (config file overlaid
// with explicit flags).
int cmd_augment(const KeyValues& kv, std::ostream& out, std::ostream& err);
int cmd_preview(const KeyValues& kv, std::ostream& out, std::ostream& err);
int cmd_stats(const KeyValues& kv, const std::vector<std::string>& splits, std::ostream& out,
              std::ostream& err);
int cmd_tile(const KeyValues& kv, std::ostream& out, std::ostream& err);

struct PreviewCell {
  DeformationParams params;
  double changed_fraction = 0.0;   // pixels whose label differs from the original
  double max_displacement = 0.0;   // max over |dx|, |dy|
};

/// Panel grid: the original pair first, then one deformed-label overlay per
/// (alpha, sigma) in `grid`. Cell k uses the stream derived from
/// (seed, k, 0), so every cell is reproducible on its own.
ImagePlane render_preview(const SamplePair& pair, const OmegaSet& grid, std::uint64_t seed,
                          const WarpSpec& warp, std::vector<PreviewCell>* cells = nullptr);

/// Overlay colour for class index c (cycled every 16 classes).
std::array<std::uint8_t, 3> class_color(std::uint8_t c);

}  // namespace nseg::cli
