#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nseg/image.hpp"

namespace nseg {

/// Areas of the maximal 8-connected regions with value `class_index`,
/// ascending. Ignore pixels belong to no component.
std::vector<std::int64_t> connected_components(const LabelMask& mask, int class_index);

/// Lower bounds of the default area intervals:
/// [0,10), [10,100), [100,1000), [1000,10000), [10000,inf).
std::vector<std::int64_t> default_area_bins();

inline constexpr std::int64_t kDefaultTinyThreshold = 10;

struct ClassAreas {
  std::vector<std::int64_t> areas;       // ascending
  std::vector<std::int64_t> histogram;   // one count per bin
  std::int64_t tiny = 0;                 // components with area < threshold
};

/// Per-class component area distribution over a corpus. Reports over disjoint
/// corpora merge into the report over their union, independent of order.
class AreaReport {
 public:
  /// `bins` are strictly increasing lower bounds and the first must be <= 1
  /// so that every component lands in some bin.
  explicit AreaReport(std::vector<std::int64_t> bins = default_area_bins(),
                      std::int64_t tiny_threshold = kDefaultTinyThreshold);

  /// Adds the components of every class of one mask.
  void add(const LabelMask& mask);
  void merge(const AreaReport& other);

  [[nodiscard]] const std::vector<std::int64_t>& bins() const { return bins_; }
  [[nodiscard]] std::int64_t tiny_threshold() const { return tiny_threshold_; }
  [[nodiscard]] const std::vector<ClassAreas>& classes() const { return classes_; }
  [[nodiscard]] std::int64_t mask_count() const { return masks_; }

  [[nodiscard]] std::int64_t total_components() const;
  [[nodiscard]] std::int64_t tiny_components() const;
  /// tiny / total, or 0 for an empty report.
  [[nodiscard]] double tiny_fraction() const;
  /// Summed histogram over all classes.
  [[nodiscard]] std::vector<std::int64_t> histogram() const;

  [[nodiscard]] std::string to_json() const;
  /// Header "class,bin_lo,bin_hi,count"; bin_hi is empty for the open bin.
  [[nodiscard]] std::string to_csv() const;

  friend bool operator==(const AreaReport&, const AreaReport&);

 private:
  void add_areas(int class_index, std::span<const std::int64_t> areas);
  [[nodiscard]] std::size_t bin_of(std::int64_t area) const;

  std::vector<std::int64_t> bins_;
  std::int64_t tiny_threshold_;
  std::vector<ClassAreas> classes_;
  std::int64_t masks_ = 0;
};

AreaReport area_report(std::span<const LabelMask> masks,
                       std::vector<std::int64_t> bins = default_area_bins(),
                       std::int64_t tiny_threshold = kDefaultTinyThreshold);

}  // namespace nseg
