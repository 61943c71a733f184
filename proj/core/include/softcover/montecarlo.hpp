#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "softcover/codebook.hpp"
#include "softcover/exponents.hpp"

namespace softcover {

struct FixedRate {
  double rate_bits = 0.0;
};

/// R_n = I + Qinv(eps) sqrt(V/n) + c log2(n)/n; d and r parametrize the failure bound.
struct SecondOrderRate {
  double eps_target = 0.25;
  double c = 3.0;
  double d = 1.0;
  double r = 0.5;
};

using RateSpec = std::variant<FixedRate, SecondOrderRate>;

struct TrialConfig {
  TrialConfig(FiniteDistribution input, Channel channel)
      : qx(std::move(input)), ch(std::move(channel)) {}

  FiniteDistribution qx;
  Channel ch;
  std::vector<int> n_list;
  RateSpec rate = FixedRate{};
  int trials = 1;
  std::uint64_t master_seed = 0;
  double delta = 0.05;
  std::optional<double> epsilon_override;
  std::vector<double> thresholds;  // extra TV levels for tail estimates
  unsigned threads = 1;
  EngineCaps caps;
  ReportPath path = ReportPath::Auto;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Codebook seed of trial `trial` at blocklength `n`:
/// mix64(mix64(mix64(master) ^ n) ^ trial).
std::uint64_t trial_seed(std::uint64_t master, int n, int trial) noexcept;

struct TrialRecord {
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  SoftCoverReport report;

  bool operator==(const TrialRecord&) const = default;
};

struct TailEstimate {
  double threshold = 0.0;
  double p_hat = 0.0;
  double stderr_ = 0.0;
};

/// Fraction of `tvs` strictly above `threshold` with its binomial standard error.
TailEstimate tail_estimate(std::span<const double> tvs, double threshold);

double median(std::vector<double> values);

struct DecayPoint {
  int n = 0;
  double median_tv = 0.0;
};

struct DecayFit {
  double slope = 0.0;   // decay rate, bits per symbol (positive when TV shrinks)
  double stderr_ = 0.0;
  std::vector<int> excluded_n;  // blocklengths dropped for a zero median
};

/// OLS of log2(median TV) against n. Points with zero median are excluded;
/// throws DegenerateFit when fewer than three remain.
DecayFit fit_decay(std::span<const DecayPoint> points);

/// Everything about one blocklength that does not depend on the trials.
struct BlocklengthPlan {
  int n = 0;
  double rate_bits = 0.0;
  std::uint64_t codebook_size = 0;
  double epsilon = 0.0;
  /// TV level the theorem certifies and ln of its failure bound, when defined.
  std::optional<double> bound_tv_threshold;
  std::optional<double> failure_prob_log;
  bool vacuous = true;
  std::optional<double> gamma_delta;
};

BlocklengthPlan plan_blocklength(const TrialConfig& cfg, int n);

struct BlocklengthResult {
  BlocklengthPlan plan;
  std::vector<TrialRecord> records;  // ordered by trial index
  std::vector<double> sorted_tvs;
  double median_tv = 0.0;
  std::vector<TailEstimate> tails;  // one per cfg.thresholds entry
  std::optional<TailEstimate> theorem_tail;
  /// Empirical tail at the certified level is within 3 standard errors of the
  /// failure bound (always true when the bound is vacuous or undefined).
  bool theorem_consistent = true;
};

struct SweepResult {
  std::vector<BlocklengthResult> per_n;
  std::optional<DecayFit> fit;
  std::string fit_note;
};

/// Runs trials [begin, end) at blocklength n. Output is ordered by trial and
/// independent of cfg.threads.
std::vector<TrialRecord> run_trials(const TrialConfig& cfg, int n, int begin, int end);

/// Aggregates trial records (any order, any partition) into a SweepResult.
SweepResult assemble_sweep(const TrialConfig& cfg, std::vector<TrialRecord> records);

SweepResult run_sweep(const TrialConfig& cfg);

}  // namespace softcover
