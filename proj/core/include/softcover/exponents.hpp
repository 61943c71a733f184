#pragma once

#include <optional>

#include "softcover/info_measures.hpp"
#include "softcover/probability.hpp"

namespace softcover {

/// Standard normal upper tail 1 - Phi(x).
double qfunc(double x);

/// Inverse of qfunc on (0, 1), by bracketed bisection.
double qfunc_inv(double eps);

/// (alpha - 1) (I + epsilon - d_alpha): exponent of the atypical-set probability.
double beta_exponent(const InfoProfile& profile, double dalpha, double alpha, double epsilon);

/// Typicality slack that balances the two Chernoff terms for a given alpha.
double optimized_epsilon(double rate, double delta, double alpha, double dalpha,
                         double mutual_info);

/// (alpha - 1) / (2 alpha - 1) * (R - delta - d_alpha), the quantity maximized over alpha.
double exponent_objective(double rate, double delta, double alpha, double dalpha);

/// ln of (1 + |Y|^n) exp(-2^(n delta) / 3), the codebook failure probability bound.
double theorem1_failure_log(std::size_t output_size, int n, double delta);

struct ExponentResult {
  double gamma_delta = 0.0;  // bits
  /// Maximizing order; +infinity when the supremum is the alpha -> infinity limit.
  double alpha_star = 0.0;
  bool alpha_at_boundary = false;
  double epsilon_star = 0.0;
  double beta = 0.0;
  double mutual_info = 0.0;
  double rate = 0.0;
  double delta = 0.0;
  // Filled when a blocklength is supplied.
  std::optional<int> n;
  std::optional<double> tv_bound_log2;  // log2(3 * 2^(-n gamma))
  std::optional<double> failure_log;    // natural log of the failure bound
  std::optional<bool> vacuous;
};

/// Supremum over alpha > 1 of exponent_objective, located on the compact
/// reparametrization t = (alpha - 1) / (2 alpha - 1) in [0, 1/2]. The endpoint
/// t = 1/2 is evaluated with d_infinity, so suprema that are only approached as
/// alpha grows without bound are reported with alpha_at_boundary set.
///
/// Throws RateTooLow unless 0 < delta < R - I(X;Y).
ExponentResult gamma_delta(const FiniteDistribution& qx, const Channel& ch, double rate,
                           double delta, std::optional<int> n = std::nullopt);

struct Theorem1Bound {
  double tv_threshold = 0.0;  // 3 * 2^(-n gamma)
  double failure_prob_log = 0.0;
  bool vacuous = true;
  ExponentResult exponent;
};

Theorem1Bound theorem1_bound(const FiniteDistribution& qx, const Channel& ch, double rate,
                             double delta, int n);

struct SecondOrderPlan {
  double epsilon_target = 0.0;
  double c = 0.0;
  double d = 0.0;
  double r = 0.0;
  int n = 0;
  double rate = 0.0;   // R_n in bits
  double slack = 0.0;  // typicality slack epsilon_n
  double mu_n = 0.0;
  double failure_log = 0.0;         // ln of the two-term Chernoff union bound
  double target_failure_log = 0.0;  // -n^d
  double tv_bound = 0.0;            // mu_n (1 + 1/sqrt n) + 1/sqrt n
  bool vacuous = true;
};

/// R_n = I + Qinv(eps) sqrt(V/n) + c log2(n)/n, with the accompanying slack,
/// Berry-Esseen level mu_n and failure bound. log n is taken base 2.
SecondOrderPlan second_order_plan(const InfoProfile& profile, std::size_t output_size,
                                  double eps_target, int n, double c, double d, double r);

/// Upper bound on P(sum of n information densities > n(I + epsilon)) by Berry-Esseen.
double berry_esseen_bound(const InfoProfile& profile, int n, double epsilon);

}  // namespace softcover
