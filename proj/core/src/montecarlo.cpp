#include "softcover/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace softcover {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, int n, int trial) noexcept {
  return mix64(mix64(mix64(master) ^ static_cast<std::uint64_t>(n)) ^
               static_cast<std::uint64_t>(trial));
}

TailEstimate tail_estimate(std::span<const double> tvs, double threshold) {
  TailEstimate out;
  out.threshold = threshold;
  if (tvs.empty()) return out;
  const auto above = std::count_if(tvs.begin(), tvs.end(), [&](double v) { return v > threshold; });
  const double t = static_cast<double>(tvs.size());
  out.p_hat = static_cast<double>(above) / t;
  out.stderr_ = std::sqrt(out.p_hat * (1.0 - out.p_hat) / t);
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

DecayFit fit_decay(std::span<const DecayPoint> points) {
  DecayFit fit;
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    if (p.median_tv > 0.0) {
      xs.push_back(p.n);
      ys.push_back(std::log2(p.median_tv));
    } else {
      fit.excluded_n.push_back(p.n);
    }
  }
  const std::size_t k = xs.size();
  if (k < 3) throw Error(Errc::DegenerateFit, "need three blocklengths with positive median TV");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw Error(Errc::DegenerateFit, "blocklengths must be distinct");
  const double b = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = ys[i] - (my + b * (xs[i] - mx));
    ssr += e * e;
  }
  fit.slope = b == 0.0 ? 0.0 : -b;
  fit.stderr_ = std::sqrt(ssr / static_cast<double>(k - 2) / sxx);
  return fit;
}

BlocklengthPlan plan_blocklength(const TrialConfig& cfg, int n) {
  BlocklengthPlan plan;
  plan.n = n;
  if (const auto* fixed = std::get_if<FixedRate>(&cfg.rate)) {
    plan.rate_bits = fixed->rate_bits;
    std::optional<Theorem1Bound> bound;
    try {
      bound = theorem1_bound(cfg.qx, cfg.ch, fixed->rate_bits, cfg.delta, n);
    } catch (const Error& e) {
      if (e.code() != Errc::RateTooLow || !cfg.epsilon_override) throw;
    }
    if (bound) {
      plan.bound_tv_threshold = bound->tv_threshold;
      plan.failure_prob_log = bound->failure_prob_log;
      plan.vacuous = bound->vacuous;
      plan.gamma_delta = bound->exponent.gamma_delta;
      plan.epsilon = bound->exponent.epsilon_star;
    }
  } else {
    const auto& so = std::get<SecondOrderRate>(cfg.rate);
    const auto profile = info_profile(cfg.qx, cfg.ch);
    SecondOrderPlan sp;
    try {
      sp = second_order_plan(profile, cfg.ch.output_size(), so.eps_target, n, so.c, so.d, so.r);
    } catch (const Error& e) {
      if (e.code() == Errc::ZeroDispersion) {
        throw Error(Errc::InvalidRate, "second-order rate needs positive dispersion");
      }
      throw;
    }
    plan.rate_bits = sp.rate;
    plan.epsilon = sp.slack;
    plan.bound_tv_threshold = so.eps_target;
    plan.failure_prob_log = sp.failure_log;
    plan.vacuous = sp.vacuous;
  }
  if (cfg.epsilon_override) plan.epsilon = *cfg.epsilon_override;
  plan.codebook_size = codebook_size(n, plan.rate_bits, cfg.caps.max_codewords);
  if (!sequence_count(cfg.ch.output_size(), n) ||
      *sequence_count(cfg.ch.output_size(), n) > cfg.caps.max_space) {
    throw Error(Errc::SpaceTooLarge,
                "output space exceeds the enumeration cap at n=" + std::to_string(n));
  }
  return plan;
}

std::vector<TrialRecord> run_trials(const TrialConfig& cfg, int n, int begin, int end) {
  const BlocklengthPlan plan = plan_blocklength(cfg, n);
  const int count = std::max(end - begin, 0);
  std::vector<TrialRecord> out(static_cast<std::size_t>(count));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        TrialRecord rec;
        rec.n = n;
        rec.trial = begin + i;
        rec.seed = trial_seed(cfg.master_seed, n, rec.trial);
        const Codebook cb =
            sample_codebook_with_size(cfg.qx, n, plan.codebook_size, rec.seed, cfg.caps);
        rec.report = soft_cover_report(cb, cfg.qx, cfg.ch, plan.epsilon, cfg.path, cfg.caps);
        out[static_cast<std::size_t>(i)] = rec;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const unsigned threads = std::clamp<unsigned>(cfg.threads, 1, std::max(count, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

SweepResult assemble_sweep(const TrialConfig& cfg, std::vector<TrialRecord> records) {
  std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::pair(a.n, a.trial) < std::pair(b.n, b.trial);
  });
  std::map<int, std::vector<TrialRecord>> by_n;
  for (auto& rec : records) by_n[rec.n].push_back(rec);

  SweepResult result;
  std::vector<DecayPoint> points;
  for (int n : cfg.n_list) {
    BlocklengthResult br;
    br.plan = plan_blocklength(cfg, n);
    br.records = std::move(by_n[n]);
    for (const auto& rec : br.records) br.sorted_tvs.push_back(rec.report.tv);
    std::sort(br.sorted_tvs.begin(), br.sorted_tvs.end());
    br.median_tv = median(br.sorted_tvs);
    for (double t : cfg.thresholds) br.tails.push_back(tail_estimate(br.sorted_tvs, t));
    if (br.plan.bound_tv_threshold) {
      br.theorem_tail = tail_estimate(br.sorted_tvs, *br.plan.bound_tv_threshold);
      if (!br.plan.vacuous) {
        br.theorem_consistent = br.theorem_tail->p_hat <=
                                std::exp(*br.plan.failure_prob_log) + 3.0 * br.theorem_tail->stderr_;
      }
    }
    points.push_back({n, br.median_tv});
    result.per_n.push_back(std::move(br));
  }
  try {
    result.fit = fit_decay(points);
    if (!result.fit->excluded_n.empty()) result.fit_note = "blocklengths with zero median TV excluded";
  } catch (const Error& e) {
    result.fit_note = e.what();
  }
  return result;
}

SweepResult run_sweep(const TrialConfig& cfg) {
  if (cfg.trials < 1) throw Error(Errc::InvalidArgument, "trials must be at least 1");
  if (cfg.n_list.empty() || !std::is_sorted(cfg.n_list.begin(), cfg.n_list.end()) ||
      std::adjacent_find(cfg.n_list.begin(), cfg.n_list.end()) != cfg.n_list.end()) {
    throw Error(Errc::InvalidArgument, "n_list must be nonempty and strictly ascending");
  }
  std::vector<TrialRecord> all;
  for (int n : cfg.n_list) {
    auto recs = run_trials(cfg, n, 0, cfg.trials);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return assemble_sweep(cfg, std::move(all));
}

}  // namespace softcover
