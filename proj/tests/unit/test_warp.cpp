#include <doctest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "nseg/error.hpp"
#include "nseg/warp.hpp"
#include "oracles.hpp"

using namespace nseg;

namespace {

DisplacementField constant_field(int w, int h, double dx, double dy) {
  DisplacementField f = DisplacementField::zero(w, h);
  std::fill(f.dx.begin(), f.dx.end(), dx);
  std::fill(f.dy.begin(), f.dy.end(), dy);
  return f;
}

std::set<std::uint8_t> value_set(const LabelMask& m) { return {m.values.begin(), m.values.end()}; }

}  // namespace

TEST_CASE("clamp_index rounds half away from zero then clamps") {
  CHECK(clamp_index(-2.3, 10) == 0);
  CHECK(clamp_index(9.6, 10) == 9);
  CHECK(clamp_index(4.5, 10) == 5);
  CHECK(clamp_index(3.49, 10) == 3);
  CHECK(clamp_index(-0.5, 10) == 0);
  CHECK(clamp_index(0.5, 10) == 1);
  CHECK(clamp_index(8.5, 10) == 9);
  CHECK(clamp_index(1e300, 10) == 9);
  CHECK(clamp_index(-1e300, 10) == 0);
  CHECK(clamp_index(std::nan(""), 10) == 0);
  CHECK(clamp_index(5.0, 1) == 0);
}

TEST_CASE("zero field is the identity in both mappings") {
  std::mt19937_64 gen(1);
  const LabelMask mask = fixture::random_mask(13, 9, 4, gen, 0.1);
  const ImagePlane img = fixture::random_image(13, 9, 3, gen);
  const auto zero = DisplacementField::zero(13, 9);
  for (Mapping m : {Mapping::forward, Mapping::backward}) {
    WarpSpec spec;
    spec.mapping = m;
    CHECK(warp_label(mask, zero, spec) == mask);
    CHECK(warp_image(img, zero, spec) == img);
    spec.image_interp = Interpolation::bilinear;
    CHECK(warp_image(img, zero, spec) == img);
  }
}

TEST_CASE("constant +1 shift on a 3x3 mask leaves the first column empty") {
  const LabelMask mask(3, 3, 2, 1);
  const auto f = constant_field(3, 3, 1.0, 0.0);
  const LabelMask out = warp_label(mask, f, WarpSpec{});
  for (int y = 0; y < 3; ++y) {
    CHECK(out.at(0, y) == kIgnore);
    CHECK(out.at(1, y) == 1);
    CHECK(out.at(2, y) == 1);
  }

  WarpSpec fill;
  fill.fill = HoleFill::nearest_source;
  const LabelMask filled = warp_label(mask, f, fill);
  CHECK(value_set(filled) == std::set<std::uint8_t>{1});
}

TEST_CASE("forward scatter matches the naive oracle on an 8x8 five-class mask") {
  std::mt19937_64 gen(8);
  const LabelMask mask = fixture::random_mask(8, 8, 5, gen);
  RandomStream rng = derive_stream(8, 8, 8);
  const auto f = generate_displacement_field(8, 8, {15.0, 3.0}, rng);
  CHECK(warp_label(mask, f, WarpSpec{}) == oracle::scatter(mask, f));
}

TEST_CASE("forward scatter and backward gather match the oracles on 200 random instances") {
  std::mt19937_64 gen(200);
  const std::vector<DeformationParams> omega = {{1, 3}, {15, 5}, {30, 10}, {50, 3}, {100, 5}};
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 1 + static_cast<int>(gen() % 16);
    const int h = 1 + static_cast<int>(gen() % 16);
    const int classes = 1 + static_cast<int>(gen() % 6);
    const LabelMask mask = fixture::random_mask(w, h, classes, gen, trial % 3 == 0 ? 0.1 : 0.0);
    RandomStream rng = derive_stream(trial, 0, 0);
    const auto f = generate_displacement_field(w, h, omega[static_cast<std::size_t>(trial) % 5], rng);
    CAPTURE(trial);
    CHECK(warp_label(mask, f, WarpSpec{}) == oracle::scatter(mask, f));
    WarpSpec back;
    back.mapping = Mapping::backward;
    CHECK(warp_label(mask, f, back) == oracle::gather(mask, f));
  }
}

TEST_CASE("collapsed scatter equals per-class one-hot scatter") {
  std::mt19937_64 gen(36);
  for (int trial = 0; trial < 100; ++trial) {
    RandomStream rng = derive_stream(trial, 1, 0);
    const auto f = generate_displacement_field(6, 6, {15.0, 3.0}, rng);
    for (int k = 0; k < 3; ++k) {
      const LabelMask mask = fixture::random_mask(6, 6, 3, gen);
      CHECK(warp_label(mask, f, WarpSpec{}) == oracle::onehot_scatter(mask, f));
    }
  }
}

TEST_CASE("warping never invents classes and backward mode never leaves holes") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const LabelMask mask = fixture::random_mask(24, 20, 4, gen);
    RandomStream rng = derive_stream(trial, 2, 0);
    const auto f = generate_displacement_field(24, 20, {30.0, 5.0}, rng);
    auto allowed = value_set(mask);
    allowed.insert(kIgnore);

    const auto fwd = warp_label(mask, f, WarpSpec{});
    for (auto v : value_set(fwd)) CHECK(allowed.contains(v));

    WarpSpec back;
    back.mapping = Mapping::backward;
    const auto bwd = warp_label(mask, f, back);
    CHECK_FALSE(value_set(bwd).contains(kIgnore));
    for (auto v : value_set(bwd)) CHECK(value_set(mask).contains(v));

    WarpSpec fill;
    fill.fill = HoleFill::nearest_source;
    const auto filled = warp_label(mask, f, fill);
    CHECK_FALSE(value_set(filled).contains(kIgnore));
    // Filling only touches holes.
    for (std::size_t i = 0; i < fwd.size(); ++i) {
      if (fwd.values[i] != kIgnore) CHECK(filled.values[i] == fwd.values[i]);
    }
  }
}

TEST_CASE("ignore source pixels do not overwrite classes") {
  LabelMask mask(2, 1, 2);
  mask.at(0, 0) = 1;
  mask.at(1, 0) = kIgnore;
  // Both pixels land on x = 1; the ignore pixel is the later writer.
  DisplacementField f = DisplacementField::zero(2, 1);
  f.dx = {1.0, 0.0};
  const auto out = warp_label(mask, f, WarpSpec{});
  CHECK(out.at(0, 0) == kIgnore);
  CHECK(out.at(1, 0) == 1);
}

TEST_CASE("dimension mismatch is rejected") {
  const LabelMask mask(4, 4, 2);
  const ImagePlane img(4, 4, 1);
  const auto f = DisplacementField::zero(4, 5);
  CHECK_THROWS_AS(warp_label(mask, f, WarpSpec{}), InvalidInput);
  CHECK_THROWS_AS(warp_image(img, f, WarpSpec{}), InvalidInput);
}

TEST_CASE("constant image stays constant under backward warps") {
  const ImagePlane img(16, 12, 3, 128);
  RandomStream rng = derive_stream(4, 4, 4);
  const auto f = generate_displacement_field(16, 12, {50.0, 3.0}, rng);
  WarpSpec spec;
  spec.mapping = Mapping::backward;
  CHECK(warp_image(img, f, spec) == img);
  spec.image_interp = Interpolation::bilinear;
  CHECK(warp_image(img, f, spec) == img);
}

TEST_CASE("backward nearest image warp equals the gather oracle on a ramp") {
  const ImagePlane ramp = fixture::ramp_image(8, 8);
  RandomStream rng = derive_stream(15, 3, 0);
  const auto f = generate_displacement_field(8, 8, {15.0, 3.0}, rng);
  WarpSpec spec;
  spec.mapping = Mapping::backward;
  CHECK(warp_image(ramp, f, spec) == oracle::gather(ramp, f));

  const ImagePlane rgb = fixture::ramp_image(8, 8, 3);
  CHECK(warp_image(rgb, f, spec) == oracle::gather(rgb, f));
}

TEST_CASE("forward image warp writes nearest with zero holes") {
  ImagePlane img(3, 1, 1);
  img.samples = {10, 20, 30};
  auto f = DisplacementField::zero(3, 1);
  std::fill(f.dx.begin(), f.dx.end(), 1.0);
  const auto out = warp_image(img, f, WarpSpec{});
  CHECK(out.samples == std::vector<std::uint8_t>{0, 10, 30});
}

TEST_CASE("bilinear gather interpolates between neighbours") {
  ImagePlane img(2, 1, 1);
  img.samples = {0, 100};
  auto f = DisplacementField::zero(2, 1);
  f.dx = {-0.25, 0.0};  // output x = 0 samples source x = 0.25
  WarpSpec spec;
  spec.mapping = Mapping::backward;
  spec.image_interp = Interpolation::bilinear;
  const auto out = warp_image(img, f, spec);
  CHECK(out.samples[0] == 25);
  CHECK(out.samples[1] == 100);
}
