#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace softcover::gaussian {

/// Target N(0, (snr + 1) noise_var) per dimension, synthesized by adding
/// N(0, noise_var) noise to b^dim codewords.
struct GaussianSetup {
  double snr = 15.0;
  int dim = 1;
  int b = 5;
  double noise_var = 1.0;
  std::uint64_t seed = 0;

  double target_var() const noexcept { return (snr + 1.0) * noise_var; }
  double input_var() const noexcept { return snr * noise_var; }
  std::size_t codebook_size() const noexcept;

  /// Throws softcover::Error(InvalidArgument) on an unusable setup.
  void validate() const;
};

/// Codewords stored point-major: coords[k * dim + j] is coordinate j of word k.
struct GaussianCodebook {
  int dim = 1;
  std::vector<double> coords;

  std::size_t size() const noexcept { return coords.size() / static_cast<std::size_t>(dim); }
  std::span<const double> point(std::size_t k) const {
    return std::span<const double>(coords).subspan(k * dim, dim);
  }
};

/// I = 1/2 log2(1 + snr) bits per dimension.
double mutual_info_bits(double snr);

struct QuadratureSpec {
  int points_1d = 8193;
  int points_2d = 513;  // per axis
  double half_width_sigmas = 8.0;
};

/// b^dim codewords i.i.d. N(0, snr * noise_var) per coordinate, reproducible from setup.seed.
GaussianCodebook sample_gaussian_codebook(const GaussianSetup& setup);

/// TV between the equal-weight mixture of N(c_k, noise_var I) and the target
/// Gaussian, by trapezoid quadrature over +-half_width target standard deviations.
double mixture_tv(const GaussianCodebook& cb, const GaussianSetup& setup,
                  const QuadratureSpec& quad = {});

struct OptimizeResult {
  GaussianCodebook codebook;
  double tv = 0.0;
  int iterations = 0;
  std::vector<double> history;  // objective after each sweep, nonincreasing
};

/// Coordinate-wise pattern search on mixture_tv: try +-step on each coordinate,
/// keep strict improvements, halve the step after an unproductive sweep, stop
/// when step < tol or after max_iters sweeps.
OptimizeResult optimize_codewords(const GaussianCodebook& initial, const GaussianSetup& setup,
                                  int max_iters = 500, double tol = 1e-4,
                                  const QuadratureSpec& quad = {});

/// Deterministic start: per-dimension input-distribution quantiles (k + 1/2)/b.
GaussianCodebook quantile_codebook(const GaussianSetup& setup);

struct DensityGrid {
  int dim = 1;
  std::vector<double> xs;
  std::vector<double> ys;       // 2-D only
  std::vector<double> mixture;  // 1-D: per x; 2-D: row-major, index i * ys.size() + j
  std::vector<double> target;   // 1-D only
  GaussianCodebook codewords;
};

DensityGrid emit_density_grid(const GaussianCodebook& cb, const GaussianSetup& setup,
                              int points_per_axis = 1001, double half_width_sigmas = 8.0);

/// Trapezoid integral of a 1-D or 2-D grid density.
double grid_integral(const DensityGrid& grid, std::span<const double> values);

/// max |mixture - target| over a 1-D grid.
double grid_max_deviation(const DensityGrid& grid);

}  // namespace softcover::gaussian
