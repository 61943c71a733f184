#pragma once

#include <vector>

#include "softcover/probability.hpp"

namespace softcover {

/// Moments of the information density under Q_{X,Y}, all in bits.
struct InfoProfile {
  double mutual_info_bits = 0.0;
  double dispersion = 0.0;        // Var[i(X;Y)]
  double third_abs_moment = 0.0;  // E|i(X;Y) - I|^3
};

/// log2(W(y|x) / Q_Y(y)). Returns -inf when W(y|x) = 0 < Q_Y(y).
double information_density(const FiniteDistribution& qx, const Channel& ch, std::size_t x,
                           std::size_t y);

InfoProfile info_profile(const FiniteDistribution& qx, const Channel& ch);

/// Order-alpha Renyi divergence in bits, alpha > 0 and alpha != 1.
double renyi_divergence(const FiniteDistribution& p, const FiniteDistribution& q, double alpha);

/// Limit alpha -> infinity: log2 max_{i: p_i > 0} p_i / q_i.
double renyi_divergence_max(const FiniteDistribution& p, const FiniteDistribution& q);

/// Kullback-Leibler divergence in bits (the alpha -> 1 limit of renyi_divergence).
double renyi_limit_check(const FiniteDistribution& p, const FiniteDistribution& q);

/// Caches the joint and product distributions of a (Q_X, W) pair so that
/// d_alpha(Q_{X,Y}, Q_X Q_Y) can be evaluated many times cheaply.
class DependenceDivergence {
 public:
  DependenceDivergence(const FiniteDistribution& qx, const Channel& ch);

  double operator()(double alpha) const;
  double at_infinity() const noexcept { return d_inf_; }

 private:
  // log p_i and log q_i (natural log) over the support of p.
  std::vector<double> log_p_;
  std::vector<double> log_q_;
  double d_inf_;
};

/// A finitely-supported law of the single-letter information density,
/// support values sorted ascending with ties merged.
struct DensityLaw {
  std::vector<double> values;
  std::vector<double> probs;
};

DensityLaw information_density_law(const FiniteDistribution& qx, const Channel& ch,
                                   double merge_tol = 1e-12);

}  // namespace softcover
