#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include <json.hpp>

#include "fixtures.hpp"
#include "nseg/analysis.hpp"
#include "nseg/error.hpp"
#include "oracles.hpp"

using namespace nseg;

namespace {

// A plus sign (5 px) and a separate 10x10 square, both class 1.
LabelMask plus_and_square() {
  LabelMask m(20, 20, 2);
  m.at(2, 1) = m.at(1, 2) = m.at(2, 2) = m.at(3, 2) = m.at(2, 3) = 1;
  for (int y = 8; y < 18; ++y)
    for (int x = 8; x < 18; ++x) m.at(x, y) = 1;
  return m;
}

std::vector<std::int64_t> all_areas(const AreaReport& r) {
  std::vector<std::int64_t> out;
  for (const auto& c : r.classes()) out.insert(out.end(), c.areas.begin(), c.areas.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("component fixtures") {
  CHECK(connected_components(plus_and_square(), 1) == std::vector<std::int64_t>{5, 100});

  LabelMask diag(4, 4, 2);
  diag.at(1, 1) = 1;
  diag.at(2, 2) = 1;
  CHECK(connected_components(diag, 1) == std::vector<std::int64_t>{2});

  const AreaReport r = area_report(std::vector<LabelMask>{plus_and_square()});
  // Class 0 background is one component of 395 px; class 1 has 5 and 100.
  CHECK(r.classes()[1].areas == std::vector<std::int64_t>{5, 100});
  CHECK(r.classes()[1].tiny == 1);
  CHECK(r.classes()[1].histogram == std::vector<std::int64_t>{1, 0, 1, 0, 0});

  const AreaReport only1 = area_report(std::vector<LabelMask>{[] {
    LabelMask m = plus_and_square();
    for (auto& v : m.values)
      if (v == 0) v = kIgnore;
    return m;
  }()});
  CHECK(only1.total_components() == 2);
  CHECK(only1.tiny_fraction() == doctest::Approx(0.5));
}

TEST_CASE("ignore pixels form no components") {
  const LabelMask ign(16, 16, 3, kIgnore);
  for (int c = 0; c < 3; ++c) CHECK(connected_components(ign, c).empty());
  const AreaReport r = area_report(std::vector<LabelMask>{ign, ign});
  CHECK(r.total_components() == 0);
  CHECK(r.tiny_fraction() == 0.0);
  CHECK(r.mask_count() == 2);
}

TEST_CASE("component areas match the flood-fill oracle and conserve pixels") {
  std::mt19937_64 gen(100);
  for (int trial = 0; trial < 100; ++trial) {
    const LabelMask m = trial % 2 == 0 ? fixture::random_mask(23, 17, 3, gen, 0.05)
                                       : fixture::blob_mask(40, 30, 4, gen);
    const std::int64_t labelled = std::count_if(m.values.begin(), m.values.end(),
                                                [](std::uint8_t v) { return v != kIgnore; });
    std::int64_t total = 0;
    for (int c = 0; c < m.classes; ++c) {
      auto expect = oracle::flood_areas(m, c);
      std::sort(expect.begin(), expect.end());
      const auto got = connected_components(m, c);
      CHECK(got == expect);
      total += std::accumulate(got.begin(), got.end(), std::int64_t{0});
    }
    CHECK(total == labelled);

    const AreaReport r = area_report(std::vector<LabelMask>{m});
    const auto areas = all_areas(r);
    CHECK(std::accumulate(areas.begin(), areas.end(), std::int64_t{0}) == labelled);
    const auto h = r.histogram();
    CHECK(std::accumulate(h.begin(), h.end(), std::int64_t{0}) == r.total_components());
  }
}

TEST_CASE("reports are independent of corpus order and merge by union") {
  std::mt19937_64 gen(5);
  std::vector<LabelMask> corpus;
  for (int i = 0; i < 12; ++i) corpus.push_back(fixture::blob_mask(30, 20, 3 + i % 3, gen));
  const AreaReport whole = area_report(corpus);

  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    std::vector<LabelMask> perm = corpus;
    std::shuffle(perm.begin(), perm.end(), gen);
    CHECK(area_report(perm) == whole);

    AreaReport a = area_report(std::span(perm).first(5));
    const AreaReport b = area_report(std::span(perm).subspan(5));
    a.merge(b);
    CHECK(a == whole);
    CHECK(a.to_json() == whole.to_json());
  }
}

TEST_CASE("tiny count grows with the threshold") {
  std::mt19937_64 gen(6);
  std::vector<LabelMask> corpus;
  for (int i = 0; i < 10; ++i) corpus.push_back(fixture::random_mask(20, 20, 4, gen, 0.2));
  std::int64_t previous = -1;
  for (std::int64_t t : {0, 1, 2, 5, 10, 50, 1000}) {
    const AreaReport r = area_report(corpus, default_area_bins(), t);
    CHECK(r.tiny_components() >= previous);
    previous = r.tiny_components();
  }
  CHECK(area_report(corpus, default_area_bins(), 0).tiny_components() == 0);
  CHECK(previous == area_report(corpus).total_components());
}

TEST_CASE("report serialization") {
  const AreaReport r = area_report(std::vector<LabelMask>{plus_and_square()});
  const auto doc = nlohmann::json::parse(r.to_json());
  CHECK(doc.at("masks") == 1);
  CHECK(doc.at("tiny_threshold") == 10);

  const std::string csv = r.to_csv();
  CHECK(csv.rfind("class,bin_lo,bin_hi,count\n", 0) == 0);
  CHECK(csv.find("1,0,10,1\n") != std::string::npos);
  CHECK(csv.find("1,100,1000,1\n") != std::string::npos);
  CHECK(csv.find("1,10000,,0\n") != std::string::npos);
}

TEST_CASE("bin validation") {
  CHECK_THROWS_AS(AreaReport({}, 10), InvalidParameter);
  CHECK_THROWS_AS(AreaReport({5, 10}, 10), InvalidParameter);
  CHECK_THROWS_AS(AreaReport({0, 10, 10}, 10), InvalidParameter);
  CHECK_THROWS_AS(AreaReport({0, 10}, -1), InvalidParameter);
  AreaReport a({0, 10}, 10);
  const AreaReport b({0, 100}, 10);
  CHECK_THROWS_AS(a.merge(b), InvalidInput);
}
