#include "softcover/info_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace softcover {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_alphabet(const FiniteDistribution& p, const FiniteDistribution& q) {
  if (p.size() != q.size()) throw Error(Errc::AlphabetMismatch, "divergence arguments differ");
}

// log2 of sum_i p_i^alpha q_i^(1-alpha), computed with a max shift.
double log2_renyi_sum(std::span<const double> log_p, std::span<const double> log_q,
                      double alpha) {
  double shift = -kInf;
  for (std::size_t i = 0; i < log_p.size(); ++i) {
    shift = std::max(shift, alpha * log_p[i] + (1.0 - alpha) * log_q[i]);
  }
  if (shift == -kInf) return -kInf;
  double acc = 0.0;
  for (std::size_t i = 0; i < log_p.size(); ++i) {
    acc += std::exp(alpha * log_p[i] + (1.0 - alpha) * log_q[i] - shift);
  }
  return (shift + std::log(acc)) / std::numbers::ln2;
}

}  // namespace

double information_density(const FiniteDistribution& qx, const Channel& ch, std::size_t x,
                           std::size_t y) {
  if (x >= ch.input_size() || y >= ch.output_size()) {
    throw Error(Errc::InvalidArgument, "symbol outside alphabet");
  }
  if (!(qx[x] > 0.0)) throw Error(Errc::InvalidArgument, "information density needs Q_X(x) > 0");
  const auto qy = output_distribution(qx, ch);
  if (!(qy[y] > 0.0)) throw Error(Errc::UndefinedDensity, "Q_Y(y) = 0");
  if (ch(x, y) == 0.0) return -kInf;
  return std::log2(ch(x, y) / qy[y]);
}

InfoProfile info_profile(const FiniteDistribution& qx, const Channel& ch) {
  const auto qy = output_distribution(qx, ch);
  struct Term {
    double weight;
    double density;
  };
  std::vector<Term> terms;
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    for (std::size_t y = 0; y < ch.output_size(); ++y) {
      const double w = qx[x] * ch(x, y);
      if (w > 0.0) terms.push_back({w, std::log2(ch(x, y) / qy[y])});
    }
  }
  InfoProfile out;
  for (const auto& t : terms) out.mutual_info_bits += t.weight * t.density;
  for (const auto& t : terms) {
    const double dev = std::abs(t.density - out.mutual_info_bits);
    out.dispersion += t.weight * dev * dev;
    out.third_abs_moment += t.weight * dev * dev * dev;
  }
  // I >= 0 analytically; clip rounding dust from independent pairs.
  out.mutual_info_bits = std::max(out.mutual_info_bits, 0.0);
  return out;
}

double renyi_divergence(const FiniteDistribution& p, const FiniteDistribution& q, double alpha) {
  require_same_alphabet(p, q);
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
    throw Error(Errc::DomainError, "Renyi order must be positive, finite and != 1");
  }
  std::vector<double> log_p, log_q;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      if (alpha > 1.0) throw Error(Errc::SupportViolation, "p not absolutely continuous wrt q");
      continue;  // p^alpha q^(1-alpha) = 0 for alpha < 1
    }
    log_p.push_back(std::log(p[i]));
    log_q.push_back(std::log(q[i]));
  }
  return log2_renyi_sum(log_p, log_q, alpha) / (alpha - 1.0);
}

double renyi_divergence_max(const FiniteDistribution& p, const FiniteDistribution& q) {
  require_same_alphabet(p, q);
  double best = -kInf;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) throw Error(Errc::SupportViolation, "p not absolutely continuous wrt q");
    best = std::max(best, std::log2(p[i] / q[i]));
  }
  return best;
}

double renyi_limit_check(const FiniteDistribution& p, const FiniteDistribution& q) {
  require_same_alphabet(p, q);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) throw Error(Errc::SupportViolation, "p not absolutely continuous wrt q");
    kl += p[i] * std::log2(p[i] / q[i]);
  }
  return kl;
}

DependenceDivergence::DependenceDivergence(const FiniteDistribution& qx, const Channel& ch) {
  const auto joint = joint_distribution(qx, ch);
  const auto prod = product_distribution(qx, ch);
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (joint[i] == 0.0) continue;
    log_p_.push_back(std::log(joint[i]));
    log_q_.push_back(std::log(prod[i]));
  }
  d_inf_ = renyi_divergence_max(joint, prod);
}

double DependenceDivergence::operator()(double alpha) const {
  if (!(alpha > 0.0) || alpha == 1.0) {
    throw Error(Errc::DomainError, "Renyi order must be positive and != 1");
  }
  if (std::isinf(alpha)) return d_inf_;
  return log2_renyi_sum(log_p_, log_q_, alpha) / (alpha - 1.0);
}

DensityLaw information_density_law(const FiniteDistribution& qx, const Channel& ch,
                                   double merge_tol) {
  const auto qy = output_distribution(qx, ch);
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    for (std::size_t y = 0; y < ch.output_size(); ++y) {
      const double w = qx[x] * ch(x, y);
      if (w > 0.0) atoms.emplace_back(std::log2(ch(x, y) / qy[y]), w);
    }
  }
  std::sort(atoms.begin(), atoms.end());
  DensityLaw law;
  for (const auto& [v, w] : atoms) {
    if (!law.values.empty() && v - law.values.back() <= merge_tol) {
      law.probs.back() += w;
    } else {
      law.values.push_back(v);
      law.probs.push_back(w);
    }
  }
  return law;
}

}  // namespace softcover
