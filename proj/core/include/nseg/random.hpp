#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace nseg {

/// Deterministic random stream identified by a key of 64-bit words.
///
/// The engine is std::mt19937_64 seeded through std::seed_seq, both of which
/// are fully specified by the standard, and all real-valued draws are derived
/// from raw engine output here rather than through the implementation-defined
/// standard distributions. Streams are therefore portable across standard
/// libraries, not just across runs.
class RandomStream {
 public:
  explicit RandomStream(std::vector<std::uint64_t> key);

  /// Raw 64-bit draw.
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw on (0, 1] with 53-bit resolution. The open lower end keeps
  /// the "skip if u > p" gate exact at both p = 0 and p = 1.
  double uniform();

  /// Uniform index in [0, n). Consumes exactly one draw.
  std::size_t index(std::size_t n);

  /// Independent child stream keyed by this stream's key plus `tag`. Does not
  /// consume draws from, or depend on the position of, the parent.
  [[nodiscard]] RandomStream fork(std::uint64_t tag) const;

  [[nodiscard]] const std::vector<std::uint64_t>& key() const { return key_; }

 private:
  std::vector<std::uint64_t> key_;
  std::mt19937_64 engine_;
};

/// Stream for one sample in one epoch. Stateless in the sense that the result
/// depends only on the tuple, so any worker can reconstruct it in any order.
RandomStream derive_stream(std::uint64_t master_seed, std::int64_t sample_id,
                           std::int64_t epoch);

}  // namespace nseg
