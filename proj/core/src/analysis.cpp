#include "nseg/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "nseg/error.hpp"

namespace nseg {

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller index becomes the root; keeps roots at the first scanned pixel.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

struct Component {
  std::uint8_t value;
  std::int64_t area;
};

// Two-pass labeling: union each pixel with its already-scanned 8-neighbours
// (W, NW, N, NE) of equal value, then count pixels per root.
std::vector<Component> label_components(const LabelMask& mask) {
  const int w = mask.width;
  const int h = mask.height;
  DisjointSet sets(mask.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t v = mask.at(x, y);
      if (v == kIgnore) continue;
      const std::size_t i = mask.index(x, y);
      if (x > 0 && mask.at(x - 1, y) == v) sets.unite(i, i - 1);
      if (y > 0) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx;
          if (nx >= 0 && nx < w && mask.at(nx, y - 1) == v) sets.unite(i, mask.index(nx, y - 1));
        }
      }
    }
  }

  std::vector<std::int64_t> count(mask.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.values[i] != kIgnore) ++count[sets.find(i)];
  }
  std::vector<Component> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (count[i] > 0) out.push_back({mask.values[i], count[i]});
  }
  return out;
}

}  // namespace

std::vector<std::int64_t> connected_components(const LabelMask& mask, int class_index) {
  std::vector<std::int64_t> areas;
  if (mask.empty()) return areas;
  for (const auto& c : label_components(mask)) {
    if (c.value == class_index) areas.push_back(c.area);
  }
  std::sort(areas.begin(), areas.end());
  return areas;
}

std::vector<std::int64_t> default_area_bins() { return {0, 10, 100, 1000, 10000}; }

AreaReport::AreaReport(std::vector<std::int64_t> bins, std::int64_t tiny_threshold)
    : bins_(std::move(bins)), tiny_threshold_(tiny_threshold) {
  if (bins_.empty()) throw InvalidParameter("area bins must not be empty");
  if (tiny_threshold_ < 0) throw InvalidParameter("tiny threshold must be >= 0");
  if (bins_.front() > 1) {
    throw InvalidParameter("the first area bin must start at 0 or 1 so that every component "
                           "is counted");
  }
  for (std::size_t i = 1; i < bins_.size(); ++i) {
    if (bins_[i] <= bins_[i - 1]) throw InvalidParameter("area bins must be strictly increasing");
  }
}

std::size_t AreaReport::bin_of(std::int64_t area) const {
  const auto it = std::upper_bound(bins_.begin(), bins_.end(), area);
  return static_cast<std::size_t>(it - bins_.begin()) - 1;
}

void AreaReport::add_areas(int class_index, std::span<const std::int64_t> areas) {
  if (classes_.size() <= static_cast<std::size_t>(class_index)) {
    classes_.resize(static_cast<std::size_t>(class_index) + 1);
  }
  ClassAreas& ca = classes_[static_cast<std::size_t>(class_index)];
  if (ca.histogram.empty()) ca.histogram.assign(bins_.size(), 0);
  for (std::int64_t a : areas) {
    ++ca.histogram[bin_of(a)];
    if (a < tiny_threshold_) ++ca.tiny;
  }
  const auto mid = static_cast<std::ptrdiff_t>(ca.areas.size());
  ca.areas.insert(ca.areas.end(), areas.begin(), areas.end());
  std::sort(ca.areas.begin() + mid, ca.areas.end());
  std::inplace_merge(ca.areas.begin(), ca.areas.begin() + mid, ca.areas.end());
}

void AreaReport::add(const LabelMask& mask) {
  ++masks_;
  if (mask.empty()) return;
  std::vector<std::vector<std::int64_t>> per_class(static_cast<std::size_t>(mask.classes));
  for (const auto& c : label_components(mask)) {
    if (c.value >= per_class.size()) per_class.resize(c.value + 1u);
    per_class[c.value].push_back(c.area);
  }
  for (std::size_t k = 0; k < per_class.size(); ++k) add_areas(static_cast<int>(k), per_class[k]);
}

void AreaReport::merge(const AreaReport& other) {
  if (other.bins_ != bins_ || other.tiny_threshold_ != tiny_threshold_) {
    throw InvalidInput("cannot merge area reports with different bins or thresholds");
  }
  masks_ += other.masks_;
  for (std::size_t k = 0; k < other.classes_.size(); ++k) {
    const ClassAreas& src = other.classes_[k];
    if (classes_.size() <= k) classes_.resize(k + 1);
    ClassAreas& dst = classes_[k];
    if (dst.histogram.empty()) dst.histogram.assign(bins_.size(), 0);
    for (std::size_t b = 0; b < src.histogram.size(); ++b) dst.histogram[b] += src.histogram[b];
    dst.tiny += src.tiny;
    const auto mid = static_cast<std::ptrdiff_t>(dst.areas.size());
    dst.areas.insert(dst.areas.end(), src.areas.begin(), src.areas.end());
    std::inplace_merge(dst.areas.begin(), dst.areas.begin() + mid, dst.areas.end());
  }
}

std::int64_t AreaReport::total_components() const {
  std::int64_t n = 0;
  for (const auto& c : classes_) n += static_cast<std::int64_t>(c.areas.size());
  return n;
}

std::int64_t AreaReport::tiny_components() const {
  std::int64_t n = 0;
  for (const auto& c : classes_) n += c.tiny;
  return n;
}

double AreaReport::tiny_fraction() const {
  const std::int64_t total = total_components();
  return total == 0 ? 0.0 : static_cast<double>(tiny_components()) / static_cast<double>(total);
}

std::vector<std::int64_t> AreaReport::histogram() const {
  std::vector<std::int64_t> h(bins_.size(), 0);
  for (const auto& c : classes_) {
    for (std::size_t b = 0; b < c.histogram.size(); ++b) h[b] += c.histogram[b];
  }
  return h;
}

std::string AreaReport::to_json() const {
  nlohmann::json doc;
  doc["bins"] = bins_;
  doc["tiny_threshold"] = tiny_threshold_;
  doc["masks"] = masks_;
  doc["total_components"] = total_components();
  doc["tiny_components"] = tiny_components();
  doc["tiny_fraction"] = tiny_fraction();
  doc["histogram"] = histogram();
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    const ClassAreas& c = classes_[k];
    const auto n = static_cast<std::int64_t>(c.areas.size());
    nlohmann::json entry;
    entry["class"] = k;
    entry["components"] = n;
    entry["tiny_components"] = c.tiny;
    entry["tiny_fraction"] = n == 0 ? 0.0 : static_cast<double>(c.tiny) / static_cast<double>(n);
    entry["histogram"] = c.histogram.empty() ? std::vector<std::int64_t>(bins_.size(), 0)
                                             : c.histogram;
    classes.push_back(std::move(entry));
  }
  doc["classes"] = std::move(classes);
  return doc.dump(2);
}

std::string AreaReport::to_csv() const {
  std::ostringstream out;
  out << "class,bin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    for (std::size_t b = 0; b < bins_.size(); ++b) {
      out << k << ',' << bins_[b] << ',';
      if (b + 1 < bins_.size()) out << bins_[b + 1];
      const auto& h = classes_[k].histogram;
      out << ',' << (h.empty() ? 0 : h[b]) << '\n';
    }
  }
  return out.str();
}

bool operator==(const AreaReport& a, const AreaReport& b) {
  if (a.bins_ != b.bins_ || a.tiny_threshold_ != b.tiny_threshold_ || a.masks_ != b.masks_) {
    return false;
  }
  const std::size_t n = std::max(a.classes_.size(), b.classes_.size());
  for (std::size_t k = 0; k < n; ++k) {
    const ClassAreas empty;
    const ClassAreas& x = k < a.classes_.size() ? a.classes_[k] : empty;
    const ClassAreas& y = k < b.classes_.size() ? b.classes_[k] : empty;
    const auto hist_equal = [&](const ClassAreas& p, const ClassAreas& q) {
      const auto zero = std::vector<std::int64_t>(a.bins_.size(), 0);
      return (p.histogram.empty() ? zero : p.histogram) == (q.histogram.empty() ? zero : q.histogram);
    };
    if (x.areas != y.areas || x.tiny != y.tiny || !hist_equal(x, y)) return false;
  }
  return true;
}

AreaReport area_report(std::span<const LabelMask> masks, std::vector<std::int64_t> bins,
                       std::int64_t tiny_threshold) {
  AreaReport report(std::move(bins), tiny_threshold);
  for (const auto& m : masks) report.add(m);
  return report;
}

}  // namespace nseg
