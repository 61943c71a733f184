#include "softcover/gaussian_demo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "softcover/errors.hpp"
#include "softcover/exponents.hpp"

namespace softcover::gaussian {

namespace {

double normal_pdf(double x, double var) {
  return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

std::vector<double> axis(int points, double half_width) {
  std::vector<double> xs(static_cast<std::size_t>(points));
  const double h = 2.0 * half_width / (points - 1);
  for (int i = 0; i < points; ++i) xs[i] = -half_width + h * i;
  return xs;
}

double trapezoid_weight(std::size_t i, std::size_t count) {
  return (i == 0 || i + 1 == count) ? 0.5 : 1.0;
}

// kernel[i * K + k] = N(xs[i] - c_k; noise_var) along one coordinate.
std::vector<double> component_table(const GaussianCodebook& cb, int coord,
                                    const std::vector<double>& xs, double noise_var) {
  const std::size_t k_count = cb.size();
  std::vector<double> table(xs.size() * k_count);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      table[i * k_count + k] = normal_pdf(xs[i] - cb.coords[k * cb.dim + coord], noise_var);
    }
  }
  return table;
}

std::vector<double> mixture_1d(const GaussianCodebook& cb, const std::vector<double>& xs,
                               double noise_var) {
  std::vector<double> m(xs.size(), 0.0);
  const double inv_k = 1.0 / static_cast<double>(cb.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < cb.size(); ++k) acc += normal_pdf(xs[i] - cb.coords[k], noise_var);
    m[i] = acc * inv_k;
  }
  return m;
}

// Row-major mixture over xs × ys via the separable kernel.
std::vector<double> mixture_2d(const GaussianCodebook& cb, const std::vector<double>& xs,
                               const std::vector<double>& ys, double noise_var) {
  const std::size_t k_count = cb.size();
  const auto a = component_table(cb, 0, xs, noise_var);
  const auto b = component_table(cb, 1, ys, noise_var);
  const double inv_k = 1.0 / static_cast<double>(k_count);
  std::vector<double> m(xs.size() * ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double* ai = a.data() + i * k_count;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double* bj = b.data() + j * k_count;
      double acc = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) acc += ai[k] * bj[k];
      m[i * ys.size() + j] = acc * inv_k;
    }
  }
  return m;
}

}  // namespace

std::size_t GaussianSetup::codebook_size() const noexcept {
  std::size_t size = 1;
  for (int d = 0; d < dim; ++d) size *= static_cast<std::size_t>(std::max(b, 0));
  return size;
}

void GaussianSetup::validate() const {
  if (!(snr > 0.0) || !std::isfinite(snr)) throw Error(Errc::InvalidArgument, "snr must be positive");
  if (dim != 1 && dim != 2) throw Error(Errc::InvalidArgument, "dim must be 1 or 2");
  if (b < 1) throw Error(Errc::InvalidArgument, "b must be at least 1");
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
    throw Error(Errc::InvalidArgument, "noise_var must be positive");
  }
}

double mutual_info_bits(double snr) { return 0.5 * std::log2(1.0 + snr); }

GaussianCodebook sample_gaussian_codebook(const GaussianSetup& setup) {
  setup.validate();
  GaussianCodebook cb;
  cb.dim = setup.dim;
  cb.coords.resize(setup.codebook_size() * static_cast<std::size_t>(setup.dim));
  std::mt19937_64 rng(setup.seed);
  auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  const double sd = std::sqrt(setup.input_var());
  // Box-Muller, one normal per pair of uniforms.
  for (double& c : cb.coords) {
    const double u1 = uniform();
    const double u2 = uniform();
    c = sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  return cb;
}

GaussianCodebook quantile_codebook(const GaussianSetup& setup) {
  setup.validate();
  std::vector<double> levels(static_cast<std::size_t>(setup.b));
  const double sd = std::sqrt(setup.input_var());
  for (int k = 0; k < setup.b; ++k) levels[k] = sd * qfunc_inv(1.0 - (k + 0.5) / setup.b);
  GaussianCodebook cb;
  cb.dim = setup.dim;
  if (setup.dim == 1) {
    cb.coords = levels;
  } else {
    for (double x : levels) {
      for (double y : levels) {
        cb.coords.push_back(x);
        cb.coords.push_back(y);
      }
    }
  }
  return cb;
}

double mixture_tv(const GaussianCodebook& cb, const GaussianSetup& setup,
                  const QuadratureSpec& quad) {
  setup.validate();
  if (cb.size() == 0) throw Error(Errc::InvalidArgument, "mixture needs at least one codeword");
  if (cb.dim != setup.dim) throw Error(Errc::InvalidArgument, "codebook dimension mismatch");
  const double half_width = quad.half_width_sigmas * std::sqrt(setup.target_var());
  double integral = 0.0;
  if (setup.dim == 1) {
    const auto xs = axis(quad.points_1d, half_width);
    const auto m = mixture_1d(cb, xs, setup.noise_var);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      integral += trapezoid_weight(i, xs.size()) *
                  std::abs(m[i] - normal_pdf(xs[i], setup.target_var()));
    }
    integral *= xs[1] - xs[0];
  } else {
    const auto xs = axis(quad.points_2d, half_width);
    const auto m = mixture_2d(cb, xs, xs, setup.noise_var);
    std::vector<double> t(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) t[i] = normal_pdf(xs[i], setup.target_var());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double wi = trapezoid_weight(i, xs.size());
      for (std::size_t j = 0; j < xs.size(); ++j) {
        integral += wi * trapezoid_weight(j, xs.size()) *
                    std::abs(m[i * xs.size() + j] - t[i] * t[j]);
      }
    }
    const double h = xs[1] - xs[0];
    integral *= h * h;
  }
  return std::clamp(0.5 * integral, 0.0, 1.0);
}

OptimizeResult optimize_codewords(const GaussianCodebook& initial, const GaussianSetup& setup,
                                  int max_iters, double tol, const QuadratureSpec& quad) {
  OptimizeResult out;
  out.codebook = initial;
  out.tv = mixture_tv(out.codebook, setup, quad);
  double step = std::sqrt(setup.noise_var);
  while (out.iterations < max_iters && step >= tol) {
    ++out.iterations;
    bool improved = false;
    for (double& c : out.codebook.coords) {
      for (double dir : {1.0, -1.0}) {
        const double saved = c;
        c = saved + dir * step;
        const double tv = mixture_tv(out.codebook, setup, quad);
        if (tv < out.tv) {
          out.tv = tv;
          improved = true;
          break;
        }
        c = saved;
      }
    }
    if (!improved) step *= 0.5;
    out.history.push_back(out.tv);
  }
  return out;
}

DensityGrid emit_density_grid(const GaussianCodebook& cb, const GaussianSetup& setup,
                              int points_per_axis, double half_width_sigmas) {
  setup.validate();
  if (points_per_axis < 2) throw Error(Errc::InvalidArgument, "grid needs at least two points");
  if (cb.dim != setup.dim) throw Error(Errc::InvalidArgument, "codebook dimension mismatch");
  DensityGrid grid;
  grid.dim = setup.dim;
  grid.codewords = cb;
  grid.xs = axis(points_per_axis, half_width_sigmas * std::sqrt(setup.target_var()));
  if (setup.dim == 1) {
    grid.mixture = mixture_1d(cb, grid.xs, setup.noise_var);
    grid.target.reserve(grid.xs.size());
    for (double x : grid.xs) grid.target.push_back(normal_pdf(x, setup.target_var()));
  } else {
    grid.ys = grid.xs;
    grid.mixture = mixture_2d(cb, grid.xs, grid.ys, setup.noise_var);
  }
  return grid;
}

double grid_integral(const DensityGrid& grid, std::span<const double> values) {
  const double hx = grid.xs[1] - grid.xs[0];
  double total = 0.0;
  if (grid.dim == 1) {
    for (std::size_t i = 0; i < grid.xs.size(); ++i) {
      total += trapezoid_weight(i, grid.xs.size()) * values[i];
    }
    return total * hx;
  }
  const double hy = grid.ys[1] - grid.ys[0];
  for (std::size_t i = 0; i < grid.xs.size(); ++i) {
    for (std::size_t j = 0; j < grid.ys.size(); ++j) {
      total += trapezoid_weight(i, grid.xs.size()) * trapezoid_weight(j, grid.ys.size()) *
               values[i * grid.ys.size() + j];
    }
  }
  return total * hx * hy;
}

double grid_max_deviation(const DensityGrid& grid) {
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.target.size(); ++i) {
    worst = std::max(worst, std::abs(grid.mixture[i] - grid.target[i]));
  }
  return worst;
}

}  // namespace softcover::gaussian
