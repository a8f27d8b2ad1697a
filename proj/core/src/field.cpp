#include "nseg/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "nseg/error.hpp"
#include "nseg/parallel.hpp"

namespace nseg {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidParameter("sigma must be positive and finite, got " + std::to_string(sigma));
  }
}

std::size_t cells(int w, int h) {
  return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
}

}  // namespace

void DeformationParams::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InvalidParameter("alpha must be non-negative and finite, got " +
                           std::to_string(alpha));
  }
  check_sigma(sigma);
}

DisplacementField DisplacementField::zero(int w, int h) {
  DisplacementField f;
  f.width = w;
  f.height = h;
  f.dx.assign(cells(w, h), 0.0);
  f.dy.assign(cells(w, h), 0.0);
  f.params = {0.0, 1.0};
  return f;
}

int kernel_radius(double sigma) {
  check_sigma(sigma);
  // std::round rounds halfway cases away from zero.
  const double r = std::round(3.0 * sigma);
  return std::max(1, static_cast<int>(r));
}

GaussianKernel build_gaussian_kernel(double sigma) {
  GaussianKernel k;
  k.sigma = sigma;
  k.radius = kernel_radius(sigma);
  const int n = k.size();
  const double norm = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);
  const double denom = 2.0 * sigma * sigma;
  k.weights.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int j = -k.radius; j <= k.radius; ++j) {
    for (int i = -k.radius; i <= k.radius; ++i) {
      k.weights[static_cast<std::size_t>(j + k.radius) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(i + k.radius)] =
          norm * std::exp(-static_cast<double>(i * i + j * j) / denom);
    }
  }
  // Truncation to [-r, r]^2 loses mass; renormalize so the field stays a
  // convex combination of the noise.
  const double total = std::accumulate(k.weights.begin(), k.weights.end(), 0.0);
  for (double& w : k.weights) w /= total;
  return k;
}

std::vector<double> gaussian_taps(double sigma) {
  const int r = kernel_radius(sigma);
  const double denom = 2.0 * sigma * sigma;
  std::vector<double> taps(static_cast<std::size_t>(2 * r + 1));
  for (int i = -r; i <= r; ++i) {
    taps[static_cast<std::size_t>(i + r)] = std::exp(-static_cast<double>(i * i) / denom);
  }
  const double total = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& t : taps) t /= total;
  return taps;
}

std::vector<double> smooth_zero_padded(std::span<const double> grid, int w, int h,
                                       std::span<const double> taps, int workers) {
  if (w < 1 || h < 1) throw InvalidParameter("smoothing lattice must be non-empty");
  if (grid.size() != cells(w, h)) throw InvalidInput("grid size does not match w*h");
  if (taps.size() % 2 != 1) throw InvalidParameter("kernel must have odd length");
  const int r = static_cast<int>(taps.size() / 2);
  const auto uw = static_cast<std::size_t>(w);

  // Horizontal pass.
  std::vector<double> tmp(grid.size(), 0.0);
  parallel_for(static_cast<std::size_t>(h), workers, [&](std::size_t y) {
    const double* src = grid.data() + y * uw;
    double* dst = tmp.data() + y * uw;
    for (int x = 0; x < w; ++x) {
      const int k_lo = std::max(-r, -x);
      const int k_hi = std::min(r, w - 1 - x);
      double acc = 0.0;
      for (int k = k_lo; k <= k_hi; ++k) {
        acc += taps[static_cast<std::size_t>(k + r)] * src[x + k];
      }
      dst[x] = acc;
    }
  });

  // Vertical pass, accumulated a full row at a time.
  std::vector<double> out(grid.size(), 0.0);
  parallel_for(static_cast<std::size_t>(h), workers, [&](std::size_t yu) {
    const int y = static_cast<int>(yu);
    double* dst = out.data() + yu * uw;
    const int k_lo = std::max(-r, -y);
    const int k_hi = std::min(r, h - 1 - y);
    for (int k = k_lo; k <= k_hi; ++k) {
      const double t = taps[static_cast<std::size_t>(k + r)];
      const double* src = tmp.data() + static_cast<std::size_t>(y + k) * uw;
      for (std::size_t x = 0; x < uw; ++x) dst[x] += t * src[x];
    }
  });
  return out;
}

std::vector<double> draw_noise(int w, int h, double alpha, RandomStream& rng) {
  std::vector<double> noise(cells(w, h));
  for (double& v : noise) v = alpha * (2.0 * rng.uniform() - 1.0);
  return noise;
}

DisplacementField generate_displacement_field(int w, int h, const DeformationParams& params,
                                              RandomStream& rng, int workers) {
  if (w < 1 || h < 1) {
    throw InvalidParameter("displacement field lattice must be non-empty, got " +
                           std::to_string(w) + "x" + std::to_string(h));
  }
  params.validate();

  DisplacementField f;
  f.width = w;
  f.height = h;
  f.params = params;

  // Both noise grids are materialized before smoothing so the draw order
  // (all dx, then all dy) is independent of the worker count.
  const std::vector<double> noise_x = draw_noise(w, h, params.alpha, rng);
  const std::vector<double> noise_y = draw_noise(w, h, params.alpha, rng);
  const std::vector<double> taps = gaussian_taps(params.sigma);
  f.dx = smooth_zero_padded(noise_x, w, h, taps, workers);
  f.dy = smooth_zero_padded(noise_y, w, h, taps, workers);

  // A convex combination of values in [-alpha, alpha] is in range; rounding in
  // the normalized taps may push it out by an ulp.
  const double a = params.alpha;
  for (double& v : f.dx) v = std::clamp(v, -a, a);
  for (double& v : f.dy) v = std::clamp(v, -a, a);
  return f;
}

}  // namespace nseg
