#pragma once

#include <span>
#include <vector>

#include "nseg/random.hpp"

namespace nseg {

/// One (alpha, sigma) pair. alpha bounds the raw noise magnitude in pixels;
/// sigma is the smoothing standard deviation in pixels.
struct DeformationParams {
  double alpha = 0.0;
  double sigma = 1.0;

  /// Throws InvalidParameter unless alpha >= 0 and sigma > 0 (both finite).
  void validate() const;

  friend bool operator==(const DeformationParams&, const DeformationParams&) = default;
};

/// Normalized, truncated 2-D Gaussian on the lattice [-r, r]^2.
struct GaussianKernel {
  double sigma = 1.0;
  int radius = 1;
  std::vector<double> weights;  // (2r+1)^2, row-major, (m, n) = (0, 0) at center

  [[nodiscard]] int size() const { return 2 * radius + 1; }
  [[nodiscard]] double at(int m, int n) const {
    return weights[static_cast<std::size_t>(n + radius) * static_cast<std::size_t>(size()) +
                   static_cast<std::size_t>(m + radius)];
  }
};

/// Per-pixel displacement in pixels. dx and dy are row-major w*h grids.
struct DisplacementField {
  int width = 0;
  int height = 0;
  std::vector<double> dx;
  std::vector<double> dy;
  DeformationParams params;

  [[nodiscard]] double dx_at(int x, int y) const { return dx[idx(x, y)]; }
  [[nodiscard]] double dy_at(int x, int y) const { return dy[idx(x, y)]; }

  /// All-zero field of the given size (identity deformation).
  static DisplacementField zero(int w, int h);

 private:
  [[nodiscard]] std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
};

/// Half-width r of the Gaussian kernel: round(3 sigma), ties away from zero,
/// never below 1. The full kernel is 2r+1 wide.
int kernel_radius(double sigma);

GaussianKernel build_gaussian_kernel(double sigma);

/// Normalized 1-D Gaussian taps of length 2r+1. The outer product of this
/// vector with itself is the 2-D kernel above.
std::vector<double> gaussian_taps(double sigma);

/// Zero-padded "same" convolution of a w*h row-major grid with the separable
/// kernel `taps` x `taps`. Rows are processed independently on up to
/// `workers` threads; the result does not depend on the worker count.
std::vector<double> smooth_zero_padded(std::span<const double> grid, int w, int h,
                                       std::span<const double> taps, int workers = 1);

/// Raw noise alpha * (2u - 1) for w*h pixels in row-major order.
std::vector<double> draw_noise(int w, int h, double alpha, RandomStream& rng);

/// Smoothed random field. All dx noise is drawn before any dy noise.
DisplacementField generate_displacement_field(int w, int h, const DeformationParams& params,
                                              RandomStream& rng, int workers = 1);

}  // namespace nseg
