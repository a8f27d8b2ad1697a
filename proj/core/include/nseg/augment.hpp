#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nseg/field.hpp"
#include "nseg/image.hpp"
#include "nseg/random.hpp"
#include "nseg/warp.hpp"

namespace nseg {

/// Pool of (alpha, sigma) pairs sampled uniformly per sample per epoch.
struct OmegaSet {
  std::vector<DeformationParams> pairs;

  [[nodiscard]] std::size_t size() const { return pairs.size(); }

  /// {1, 15, 30, 50, 100} x {3, 5, 10}, alpha-major.
  static OmegaSet defaults();

  /// Parses "a1,a2,...xs1,s2,..." into the alpha-major Cartesian product.
  static OmegaSet parse(std::string_view text);

  /// Throws InvalidParameter if empty or any pair is invalid.
  void validate() const;

  friend bool operator==(const OmegaSet&, const OmegaSet&) = default;
};

/// Canonical product text for `omega` when it is a full Cartesian product,
/// otherwise a ';'-separated list of "alpha:sigma" pairs (which parse() also
/// accepts).
std::string format_omega(const OmegaSet& omega);

enum class AugmentMode { label_only, image_only, identical };

struct ResizeRange {
  double lo = 1.0;
  double hi = 1.0;

  friend bool operator==(const ResizeRange&, const ResizeRange&) = default;
};

struct AugmentConfig {
  double p = 0.5;
  OmegaSet omega = OmegaSet::defaults();
  AugmentMode mode = AugmentMode::label_only;
  WarpSpec warp;
  std::uint64_t master_seed = 0;
  double hflip_p = 0.0;
  std::optional<ResizeRange> resize;

  void validate() const;

  friend bool operator==(const AugmentConfig&, const AugmentConfig&) = default;
};

/// Builds a config from textual key/value pairs. Keys mirror the CLI flags:
/// mode, p, omega, seed, fill, mapping, hflip-p, resize, image-interp.
/// Missing keys take the defaults above; unknown keys and malformed values
/// raise InvalidParameter naming the key.
AugmentConfig config_from_mapping(const std::map<std::string, std::string>& mapping);

/// Inverse of config_from_mapping; every key is present.
std::map<std::string, std::string> config_to_mapping(const AugmentConfig& config);

std::string_view to_string(AugmentMode mode);
AugmentMode parse_mode(std::string_view text);

struct SamplePair {
  ImagePlane image;
  LabelMask mask;
  std::int64_t sample_id = 0;
  std::int64_t epoch = 0;

  friend bool operator==(const SamplePair&, const SamplePair&) = default;
};

/// Record of the random decisions made for one sample.
struct AugmentTrace {
  bool deformed = false;
  DeformationParams params;  // meaningful only when deformed
  bool flipped = false;
  std::optional<double> scale;
  // Filled only when keep_fields is set before the call.
  bool keep_fields = false;
  std::optional<DisplacementField> mask_field;
  std::optional<DisplacementField> image_field;
};

/// Uniform choice over omega; consumes exactly one draw.
DeformationParams sample_params(const OmegaSet& omega, RandomStream& rng);

/// Gate and parameter draws shared by every mode: one gate draw u, then one
/// omega draw (always consumed, so the draw budget is fixed). Returns the
/// chosen pair, or nullopt when u > p.
std::optional<DeformationParams> draw_deformation(const AugmentConfig& config,
                                                  RandomStream& rng);

/// Label-only elastic deformation of one mask. The input is not modified.
LabelMask nsegment(const LabelMask& mask, const AugmentConfig& config, RandomStream& rng,
                   AugmentTrace* trace = nullptr);

/// Deformation according to config.mode, followed by horizontal flip and
/// random resize. Flip and resize draw from their own forks of `rng`.
SamplePair apply_augmentation(const SamplePair& sample, const AugmentConfig& config,
                              RandomStream& rng, AugmentTrace* trace = nullptr);

/// apply_augmentation with the stream derived from (seed, sample_id, epoch).
SamplePair augment_sample(const SamplePair& sample, const AugmentConfig& config,
                          AugmentTrace* trace = nullptr);

struct BatchResult {
  std::vector<SamplePair> samples;
  std::vector<AugmentTrace> traces;
};

/// augment_sample over a batch on `workers` threads. Output is identical for
/// every worker count.
BatchResult augment_batch(std::span<const SamplePair> samples, const AugmentConfig& config,
                          int workers);

}  // namespace nseg
