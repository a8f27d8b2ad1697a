#include "nseg/random.hpp"

#include <utility>

namespace nseg {

namespace {

__extension__ using uint128 = unsigned __int128;

std::mt19937_64 seeded_engine(const std::vector<std::uint64_t>& key) {
  // seed_seq consumes 32-bit words; split each key word low half first. The
  // key length is prepended so that keys of different lengths cannot alias.
  std::vector<std::uint32_t> words;
  words.reserve(key.size() * 2 + 1);
  words.push_back(static_cast<std::uint32_t>(key.size()));
  for (std::uint64_t k : key) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::vector<std::uint64_t> key)
    : key_(std::move(key)), engine_(seeded_engine(key_)) {}

double RandomStream::uniform() {
  // (k + 1) / 2^53 for k uniform in [0, 2^53): lands on (0, 1].
  constexpr double kScale = 1.0 / 9007199254740992.0;
  return static_cast<double>((engine_() >> 11) + 1) * kScale;
}

std::size_t RandomStream::index(std::size_t n) {
  // floor(n * k / 2^53) partitions the 53-bit range into n near-equal slices.
  const std::uint64_t k = engine_() >> 11;
  const auto i = static_cast<std::size_t>(
      (static_cast<uint128>(k) * n) >> 53);
  return i < n ? i : n - 1;
}

RandomStream RandomStream::fork(std::uint64_t tag) const {
  std::vector<std::uint64_t> child = key_;
  child.push_back(tag);
  return RandomStream(std::move(child));
}

RandomStream derive_stream(std::uint64_t master_seed, std::int64_t sample_id,
                           std::int64_t epoch) {
  return RandomStream({master_seed, static_cast<std::uint64_t>(sample_id),
                       static_cast<std::uint64_t>(epoch)});
}

}  // namespace nseg
