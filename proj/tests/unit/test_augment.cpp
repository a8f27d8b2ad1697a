#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "nseg/augment.hpp"
#include "nseg/error.hpp"
#include "oracles.hpp"

using namespace nseg;

namespace {

AugmentConfig config_with(double p, const char* omega, AugmentMode mode = AugmentMode::label_only) {
  AugmentConfig c;
  c.p = p;
  c.omega = OmegaSet::parse(omega);
  c.mode = mode;
  c.master_seed = 42;
  return c;
}

LabelMask two_class_fixture() {
  LabelMask m(16, 16, 2);
  for (int y = 4; y < 12; ++y)
    for (int x = 3; x < 10; ++x) m.at(x, y) = 1;
  return m;
}

}  // namespace

TEST_CASE("omega parsing") {
  const auto def = OmegaSet::defaults();
  REQUIRE(def.size() == 15u);
  CHECK(def.pairs.front() == DeformationParams{1, 3});
  CHECK(def.pairs[1] == DeformationParams{1, 5});
  CHECK(def.pairs.back() == DeformationParams{100, 10});
  CHECK(OmegaSet::parse("1,15,30,50,100x3,5,10") == def);
  CHECK(OmegaSet::parse(" 15 x 5 ").pairs == std::vector<DeformationParams>{{15, 5}});
  CHECK(OmegaSet::parse("1:3;15:5").pairs == std::vector<DeformationParams>{{1, 3}, {15, 5}});

  CHECK_THROWS_AS(OmegaSet::parse(""), InvalidParameter);
  CHECK_THROWS_AS(OmegaSet::parse("1,2"), InvalidParameter);
  CHECK_THROWS_AS(OmegaSet::parse("ax3"), InvalidParameter);
  CHECK_THROWS_AS(OmegaSet::parse("1x0"), InvalidParameter);
  CHECK_THROWS_AS(OmegaSet::parse("-1x3"), InvalidParameter);
  CHECK_THROWS_AS(OmegaSet::parse("1x3x5"), InvalidParameter);
  CHECK_THROWS_AS(OmegaSet{}.validate(), InvalidParameter);
}

TEST_CASE("omega text round-trips") {
  CHECK(format_omega(OmegaSet::defaults()) == "1,15,30,50,100x3,5,10");
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    OmegaSet o;
    const int k = 1 + static_cast<int>(gen() % 6);
    for (int i = 0; i < k; ++i) {
      o.pairs.push_back({static_cast<double>(gen() % 200) / 4.0, 0.25 + static_cast<double>(gen() % 40) / 4.0});
    }
    CHECK(OmegaSet::parse(format_omega(o)) == o);
  }
}

TEST_CASE("sample_params") {
  OmegaSet single = OmegaSet::parse("15x5");
  RandomStream rng = derive_stream(1, 1, 1);
  for (int i = 0; i < 100; ++i) CHECK(sample_params(single, rng) == DeformationParams{15, 5});

  RandomStream a = derive_stream(7, 0, 0);
  RandomStream b = derive_stream(7, 0, 0);
  CHECK(sample_params(OmegaSet::defaults(), a) == sample_params(OmegaSet::defaults(), b));

  CHECK_THROWS_AS(sample_params(OmegaSet{}, rng), InvalidParameter);
}

TEST_CASE("sample_params is uniform over the default omega") {
  const OmegaSet omega = OmegaSet::defaults();
  RandomStream rng = derive_stream(2024, 0, 0);
  std::map<std::pair<double, double>, int> counts;
  constexpr int kDraws = 150000;
  for (int i = 0; i < kDraws; ++i) {
    const auto p = sample_params(omega, rng);
    ++counts[{p.alpha, p.sigma}];
  }
  CHECK(counts.size() == 15u);
  for (const auto& [pair, n] : counts) {
    CHECK(std::abs(static_cast<double>(n) / kDraws - 1.0 / 15.0) <= 0.005);
  }
}

TEST_CASE("nsegment gate and identity cases") {
  std::mt19937_64 gen(11);
  const LabelMask mask = fixture::random_mask(32, 32, 4, gen);
  for (std::int64_t id = 0; id < 20; ++id) {
    RandomStream r0 = derive_stream(1, id, 0);
    CHECK(nsegment(mask, config_with(0.0, "100x3"), r0) == mask);
    RandomStream r1 = derive_stream(1, id, 0);
    CHECK(nsegment(mask, config_with(1.0, "0x3"), r1) == mask);
  }
}

TEST_CASE("nsegment equals field generation composed with the scatter oracle") {
  const LabelMask mask = two_class_fixture();
  const LabelMask before = mask;
  const AugmentConfig config = config_with(1.0, "15x5");

  RandomStream rng = derive_stream(42, 0, 0);
  AugmentTrace trace;
  const LabelMask out = nsegment(mask, config, rng, &trace);
  CHECK(mask == before);
  CHECK(trace.deformed);
  CHECK(trace.params == DeformationParams{15, 5});

  // Replay the draw sequence by hand: gate, omega choice, then the field.
  RandomStream replay = derive_stream(42, 0, 0);
  CHECK(replay.uniform() <= 1.0);
  CHECK(replay.index(1) == 0u);
  const auto field = generate_displacement_field(16, 16, {15, 5}, replay);
  CHECK(out == oracle::scatter(mask, field));
  CHECK(out != mask);
}

TEST_CASE("mode contracts") {
  std::mt19937_64 gen(12);
  SamplePair sample{fixture::ramp_image(16, 16, 3), two_class_fixture(), 7, 3};

  SUBCASE("label only keeps the image bytes") {
    const auto out = augment_sample(sample, config_with(1.0, "30x3", AugmentMode::label_only));
    CHECK(out.image == sample.image);
    CHECK(out.mask != sample.mask);
  }
  SUBCASE("image only keeps the mask bytes") {
    const auto out = augment_sample(sample, config_with(1.0, "15,30x3", AugmentMode::image_only));
    CHECK(out.mask == sample.mask);
    CHECK(out.image != sample.image);
  }
  SUBCASE("identical applies one field to both") {
    AugmentConfig c = config_with(1.0, "30x5", AugmentMode::identical);
    AugmentTrace trace;
    trace.keep_fields = true;
    RandomStream rng = derive_stream(c.master_seed, sample.sample_id, sample.epoch);
    const auto out = apply_augmentation(sample, c, rng, &trace);
    REQUIRE(trace.mask_field.has_value());
    REQUIRE(trace.image_field.has_value());
    CHECK(trace.mask_field->dx == trace.image_field->dx);
    CHECK(trace.mask_field->dy == trace.image_field->dy);
    CHECK(out.mask == warp_label(sample.mask, *trace.mask_field, c.warp));
    CHECK(out.image == warp_image(sample.image, *trace.image_field, c.warp));
  }
}

TEST_CASE("gate law over random samples with companions disabled") {
  std::mt19937_64 gen(100);
  for (int i = 0; i < 100; ++i) {
    const SamplePair s = fixture::random_sample(20, 14, 5, gen, i, i % 3);
    CHECK(augment_sample(s, config_with(0.0, "1,15,30,50,100x3,5,10")) == s);
    CHECK(augment_sample(s, config_with(1.0, "0x3,10")) == s);
  }
}

TEST_CASE("the draw budget is fixed: skipped samples still consume the omega draw") {
  // Whatever the gate decides, the position after draw_deformation is the same.
  RandomStream a = derive_stream(3, 0, 0);
  RandomStream b = derive_stream(3, 0, 0);
  (void)draw_deformation(config_with(0.0, "1,2x3"), a);
  (void)draw_deformation(config_with(1.0, "1,2x3"), b);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams") {
  CHECK(derive_stream(42, 0, 0).next_u64() == derive_stream(42, 0, 0).next_u64());
  CHECK(derive_stream(42, 0, 0).next_u64() != derive_stream(42, 0, 1).next_u64());

  std::set<std::uint64_t> first;
  for (std::int64_t id = 0; id < 100; ++id)
    for (std::int64_t epoch = 0; epoch < 10; ++epoch) first.insert(derive_stream(42, id, epoch).next_u64());
  CHECK(first.size() == 1000u);
}

TEST_CASE("epoch diversity: a sample sees several (alpha, sigma) pairs") {
  std::mt19937_64 gen(4);
  const SamplePair base = fixture::random_sample(8, 8, 3, gen);
  AugmentConfig c = config_with(1.0, "1,15,30,50,100x3,5,10");
  std::set<std::pair<double, double>> seen;
  for (std::int64_t epoch = 0; epoch < 10; ++epoch) {
    SamplePair s = base;
    s.epoch = epoch;
    AugmentTrace t;
    augment_sample(s, c, &t);
    CHECK(t.deformed);
    seen.insert({t.params.alpha, t.params.sigma});
  }
  CHECK(seen.size() >= 2u);
}

TEST_CASE("batch output does not depend on the worker count") {
  std::mt19937_64 gen(256);
  std::vector<SamplePair> batch;
  for (int i = 0; i < 24; ++i) batch.push_back(fixture::random_sample(24, 18, 4, gen, i, 1));
  AugmentConfig c = config_with(0.5, "1,15,30x3,5", AugmentMode::identical);
  c.hflip_p = 0.5;
  c.resize = ResizeRange{0.5, 2.0};
  const auto one = augment_batch(batch, c, 1);
  const auto eight = augment_batch(batch, c, 8);
  CHECK(one.samples == eight.samples);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(one.traces[i].deformed == eight.traces[i].deformed);
    CHECK(one.traces[i].flipped == eight.traces[i].flipped);
    CHECK(one.traces[i].scale == eight.traces[i].scale);
  }
}

TEST_CASE("horizontal flip is an involution and companions follow their probabilities") {
  std::mt19937_64 gen(9);
  const SamplePair s = fixture::random_sample(11, 7, 3, gen);
  CHECK(flip_horizontal(flip_horizontal(s.mask)) == s.mask);
  CHECK(flip_horizontal(flip_horizontal(s.image)) == s.image);

  AugmentConfig c = config_with(0.0, "1x3");
  c.hflip_p = 1.0;
  const auto flipped = augment_sample(s, c);
  CHECK(flipped.mask == flip_horizontal(s.mask));
  CHECK(flipped.image == flip_horizontal(s.image));
  CHECK(flipped.mask.at(0, 0) == s.mask.at(10, 0));
}

TEST_CASE("random resize draws a scale inside the range and keeps mask classes") {
  std::mt19937_64 gen(10);
  const SamplePair s = fixture::random_sample(40, 30, 4, gen);
  AugmentConfig c = config_with(0.0, "1x3");
  c.resize = ResizeRange{0.5, 2.0};
  std::set<std::uint8_t> classes(s.mask.values.begin(), s.mask.values.end());
  for (std::int64_t epoch = 0; epoch < 10; ++epoch) {
    SamplePair e = s;
    e.epoch = epoch;
    AugmentTrace t;
    const auto out = augment_sample(e, c, &t);
    REQUIRE(t.scale.has_value());
    CHECK(*t.scale >= 0.5);
    CHECK(*t.scale <= 2.0);
    CHECK(out.mask.width == static_cast<int>(std::round(40 * *t.scale)));
    CHECK(out.image.width == out.mask.width);
    CHECK(out.image.height == out.mask.height);
    for (auto v : out.mask.values) CHECK(classes.contains(v));
  }

  c.resize = ResizeRange{1.0, 1.0};
  CHECK(augment_sample(s, c) == s);
}

TEST_CASE("config from key/value mapping") {
  const auto defaults = config_from_mapping({});
  CHECK(defaults.p == 0.5);
  CHECK(defaults.omega.size() == 15u);
  CHECK(defaults.mode == AugmentMode::label_only);
  CHECK(defaults.warp == WarpSpec{});

  const auto c = config_from_mapping(
      {{"p", "0.5"}, {"omega", "1,15,30,50,100x3,5,10"}, {"mode", "label"}});
  CHECK(c.omega.size() == 15u);

  try {
    config_from_mapping({{"p", "1.5"}});
    FAIL("p = 1.5 accepted");
  } catch (const InvalidParameter& e) {
    CHECK(std::string(e.what()).find("p") != std::string::npos);
  }
  try {
    config_from_mapping({{"alpha", "3"}});
    FAIL("unknown key accepted");
  } catch (const InvalidParameter& e) {
    CHECK(std::string(e.what()).find("'alpha'") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_mapping({{"omega", "1x"}}), InvalidParameter);
  CHECK_THROWS_AS(config_from_mapping({{"resize", "2:1"}}), InvalidParameter);
  CHECK_THROWS_AS(config_from_mapping({{"resize", "0:1"}}), InvalidParameter);
  CHECK_THROWS_AS(config_from_mapping({{"mode", "both"}}), InvalidParameter);
  CHECK_THROWS_AS(config_from_mapping({{"seed", "-1"}}), InvalidParameter);
  CHECK_THROWS_AS(config_from_mapping({{"hflip-p", "-0.1"}}), InvalidParameter);

  AugmentConfig full;
  full.p = 0.3;
  full.mode = AugmentMode::identical;
  full.master_seed = 18446744073709551615ull;
  full.warp = {Mapping::backward, Interpolation::bilinear, HoleFill::nearest_source};
  full.hflip_p = 0.25;
  full.resize = ResizeRange{0.5, 2.0};
  full.omega = OmegaSet::parse("1:3;7.5:2.5");
  CHECK(config_from_mapping(config_to_mapping(full)) == full);
}

TEST_CASE("mismatched sample dimensions are rejected") {
  SamplePair s{ImagePlane(4, 4, 1), LabelMask(4, 5, 2), 0, 0};
  CHECK_THROWS_AS(augment_sample(s, AugmentConfig{}), InvalidInput);
}
