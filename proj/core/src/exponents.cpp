#include "softcover/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace softcover {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinDispersion = 1e-12;

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double alpha_from_t(double t) { return (1.0 - t) / (1.0 - 2.0 * t); }

}  // namespace

double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double qfunc_inv(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::DomainError, "qfunc_inv needs eps in (0, 1)");
  // qfunc(-40) == 1 and qfunc(40) == 0 in double precision.
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (qfunc(mid) > eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(qfunc(lo) - eps) < std::abs(qfunc(hi) - eps) ? lo : hi;
}

double beta_exponent(const InfoProfile& profile, double dalpha, double alpha, double epsilon) {
  return (alpha - 1.0) * (profile.mutual_info_bits + epsilon - dalpha);
}

double optimized_epsilon(double rate, double delta, double alpha, double dalpha,
                         double mutual_info) {
  const double a1 = alpha - 1.0;
  return (0.5 * (rate - delta) + a1 * dalpha) / (0.5 + a1) - mutual_info;
}

double exponent_objective(double rate, double delta, double alpha, double dalpha) {
  return (alpha - 1.0) / (2.0 * alpha - 1.0) * (rate - delta - dalpha);
}

double theorem1_failure_log(std::size_t output_size, int n, double delta) {
  const double log_space = static_cast<double>(n) * std::log(static_cast<double>(output_size));
  // ln(1 + |Y|^n) without overflow.
  const double log_union = log_space > 0.0 ? log_space + std::log1p(std::exp(-log_space))
                                           : std::log1p(std::exp(log_space));
  return log_union - std::exp2(static_cast<double>(n) * delta) / 3.0;
}

ExponentResult gamma_delta(const FiniteDistribution& qx, const Channel& ch, double rate,
                           double delta, std::optional<int> n) {
  const auto profile = info_profile(qx, ch);
  const double info = profile.mutual_info_bits;
  if (!(delta > 0.0) || !(rate - delta > info)) {
    throw Error(Errc::RateTooLow, "need 0 < delta < R - I(X;Y) with I(X;Y) = " +
                                      std::to_string(info) + " bits");
  }
  const DependenceDivergence dalpha(qx, ch);

  auto objective = [&](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 0.5) return 0.5 * (rate - delta - dalpha.at_infinity());
    return t * (rate - delta - dalpha(alpha_from_t(t)));
  };

  // The objective is quasi-concave in alpha; a coarse scan brackets the peak.
  constexpr int kGrid = 2048;
  int best_k = 0;
  double best_v = objective(0.0);
  for (int k = 1; k <= kGrid; ++k) {
    const double v = objective(0.5 * k / kGrid);
    if (v > best_v) {
      best_v = v;
      best_k = k;
    }
  }
  double lo = 0.5 * std::max(best_k - 1, 0) / kGrid;
  double hi = 0.5 * std::min(best_k + 1, kGrid) / kGrid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-13) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    }
  }
  double t_star = f1 > f2 ? x1 : x2;
  double v_star = std::max(f1, f2);
  if (best_v > v_star) {
    t_star = 0.5 * best_k / kGrid;
    v_star = best_v;
  }
  const double v_boundary = objective(0.5);

  ExponentResult out;
  out.mutual_info = info;
  out.rate = rate;
  out.delta = delta;
  if (v_boundary >= v_star || t_star >= 0.5) {
    out.gamma_delta = v_boundary;
    out.alpha_star = kInf;
    out.alpha_at_boundary = true;
    // alpha -> infinity limits of the slack and of beta (= gamma pointwise).
    out.epsilon_star = dalpha.at_infinity() - info;
    out.beta = v_boundary;
  } else {
    const double alpha = alpha_from_t(t_star);
    const double d = dalpha(alpha);
    out.gamma_delta = v_star;
    out.alpha_star = alpha;
    out.epsilon_star = optimized_epsilon(rate, delta, alpha, d, info);
    out.beta = beta_exponent(profile, d, alpha, out.epsilon_star);
  }
  if (n) {
    out.n = *n;
    out.tv_bound_log2 = std::log2(3.0) - static_cast<double>(*n) * out.gamma_delta;
    out.failure_log = theorem1_failure_log(ch.output_size(), *n, delta);
    out.vacuous = *out.failure_log >= 0.0;
  }
  return out;
}

Theorem1Bound theorem1_bound(const FiniteDistribution& qx, const Channel& ch, double rate,
                             double delta, int n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "blocklength must be positive");
  Theorem1Bound out;
  out.exponent = gamma_delta(qx, ch, rate, delta, n);
  out.tv_threshold = std::exp2(*out.exponent.tv_bound_log2);
  out.failure_prob_log = *out.exponent.failure_log;
  out.vacuous = *out.exponent.vacuous;
  return out;
}

SecondOrderPlan second_order_plan(const InfoProfile& profile, std::size_t output_size,
                                  double eps_target, int n, double c, double d, double r) {
  if (!(eps_target > 0.0 && eps_target < 1.0)) {
    throw Error(Errc::DomainError, "target TV must lie in (0, 1)");
  }
  if (!(c > 2.0)) throw Error(Errc::InvalidArgument, "c must exceed 2");
  if (!(d < c - 1.0)) throw Error(Errc::InvalidArgument, "d must be below c - 1");
  if (!(r > 0.0 && r < c - d - 1.0)) throw Error(Errc::InvalidArgument, "r must lie in (0, c-d-1)");
  if (n < 2) throw Error(Errc::InvalidArgument, "blocklength must be at least 2");
  const double v = profile.dispersion;
  if (!(v > kMinDispersion)) {
    throw Error(Errc::ZeroDispersion, "second-order rate needs positive dispersion");
  }
  const double nn = static_cast<double>(n);
  const double sqrt_n = std::sqrt(nn);
  const double log_n = std::log2(nn);
  const double q_inv = qfunc_inv(eps_target);

  SecondOrderPlan plan;
  plan.epsilon_target = eps_target;
  plan.c = c;
  plan.d = d;
  plan.r = r;
  plan.n = n;
  plan.rate = profile.mutual_info_bits + q_inv * std::sqrt(v / nn) + c * log_n / nn;
  plan.slack = q_inv * std::sqrt(v / nn) + r * log_n / nn;
  plan.mu_n = qfunc(q_inv + (r / std::sqrt(v)) * log_n / sqrt_n) +
              profile.third_abs_moment / (std::pow(v, 1.5) * sqrt_n);

  // ln[exp(-mu 2^(nR) / (3n)) + |Y|^n exp(-n^(c-r-1) / 3)]
  const double atypical_term = -plan.mu_n * std::exp2(nn * plan.rate) / (3.0 * nn);
  const double typical_term = nn * std::log(static_cast<double>(output_size)) -
                              std::pow(nn, c - r - 1.0) / 3.0;
  plan.failure_log = log_add(std::isnan(atypical_term) ? -kInf : atypical_term, typical_term);
  plan.target_failure_log = -std::pow(nn, d);
  plan.tv_bound = plan.mu_n * (1.0 + 1.0 / sqrt_n) + 1.0 / sqrt_n;
  plan.vacuous = plan.failure_log >= 0.0;
  return plan;
}

double berry_esseen_bound(const InfoProfile& profile, int n, double epsilon) {
  const double v = profile.dispersion;
  if (!(v > kMinDispersion)) throw Error(Errc::ZeroDispersion, "Berry-Esseen needs V > 0");
  if (n < 1) throw Error(Errc::InvalidArgument, "blocklength must be positive");
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  return qfunc(epsilon * sqrt_n / std::sqrt(v)) +
         profile.third_abs_moment / (std::pow(v, 1.5) * sqrt_n);
}

}  // namespace softcover
