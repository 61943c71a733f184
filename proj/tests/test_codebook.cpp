#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "softcover/codebook.hpp"
#include "softcover/exponents.hpp"

using namespace softcover;
using doctest::Approx;

namespace {

// BSC(0.11), uniform input, n = 20, eps = 0.1: binomial type counting at 40 digits.
constexpr double kBsc011Atypical20 = 0.33757370141277836;

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(k);
  double s = 0;
  for (auto& v : w) s += (v = e(rng) + 1e-3);
  for (auto& v : w) v /= s;
  return w;
}

}  // namespace

TEST_CASE("sample_codebook") {
  const auto point = sample_codebook(FiniteDistribution::point_mass(2, 0), 6, 0.5, 1);
  CHECK(point.size() == 8);
  for (auto w : point.words) CHECK(w == 0);

  const auto u = FiniteDistribution::uniform(2);
  const auto a = sample_codebook(u, 10, 1.0, 99);
  const auto b = sample_codebook(u, 10, 1.0, 99);
  const auto c = sample_codebook(u, 10, 1.0, 100);
  CHECK(a.words == b.words);
  CHECK(a.words != c.words);
  CHECK(a.size() == 1024);

  // 10240 fair bits: the count of ones is within 3 sigma of 5120.
  std::uint64_t ones = 0;
  for (auto w : a.words) ones += std::popcount(w);
  CHECK(std::abs(static_cast<double>(ones) - 5120.0) <= 3 * std::sqrt(10240 * 0.25));

  CHECK(codebook_size(4, 0.9, 1 << 26) == 12);
  try {
    sample_codebook(u, 30, 1.0, 1);
    FAIL("expected SizeOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SizeOverflow);
  }
  CHECK_THROWS_AS(sample_codebook(u, 4, 0.0, 1), Error);
}

TEST_CASE("induced_distribution examples") {
  const auto u = FiniteDistribution::uniform(2);
  const auto single = make_codebook(3, 2, {5});
  const auto pm = induced_distribution(single, noiseless_channel(2));
  for (std::size_t y = 0; y < pm.size(); ++y) CHECK(pm[y] == (y == 5 ? 1.0 : 0.0));

  const auto cb = sample_codebook(u, 4, 0.5, 3);
  for (double p : induced_distribution(cb, binary_symmetric_channel(0.5))) CHECK(p == Approx(1.0 / 16));

  const auto sym = induced_distribution(make_codebook(1, 2, {0, 1}), binary_symmetric_channel(0.1));
  CHECK(sym[0] == Approx(0.5));
  CHECK(sym[1] == Approx(0.5));

  CAPTURE(u.size());
  EngineCaps tight;
  tight.max_space = 8;
  try {
    induced_distribution(sample_codebook(u, 4, 0.5, 3), binary_symmetric_channel(0.1), tight);
    FAIL("expected SpaceTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SpaceTooLarge);
  }
}

TEST_CASE("property: induced distribution matches the double-loop oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t kx = 2 + rng() % 2, ky = 2 + rng() % 2;
    oracle::Matrix w;
    for (std::size_t x = 0; x < kx; ++x) w.push_back(random_simplex(rng, ky));
    const auto qx = random_simplex(rng, kx);
    const int n = 1 + static_cast<int>(rng() % 5);
    const auto cb = sample_codebook_with_size(FiniteDistribution(qx), n, 1 + rng() % 20, rng());
    const auto p = induced_distribution(cb, Channel(w));
    const auto ref = oracle::report(cb, qx, w, 0.0);
    double sum = 0;
    for (std::size_t y = 0; y < p.size(); ++y) {
      CHECK(std::abs(p[y] - ref.p[y]) <= 1e-14);
      sum += p[y];
    }
    CHECK(sum == Approx(1.0).epsilon(1e-9));

    // Fallback path (input space over the cap) agrees with the tensor path.
    EngineCaps caps;
    caps.max_space = 1;
    for (int i = 0; i < n; ++i) caps.max_space *= ky;
    if (*sequence_count(kx, n) > caps.max_space) {
      const auto alt = induced_distribution(cb, Channel(w), caps);
      for (std::size_t y = 0; y < p.size(); ++y) CHECK(std::abs(p[y] - alt[y]) <= 1e-14);
    }
  }
}

TEST_CASE("soft_cover_report degenerate slack values") {
  const auto u = FiniteDistribution::uniform(2);
  const auto bsc = binary_symmetric_channel(0.2);
  const auto cb = sample_codebook(u, 6, 0.9, 7);
  for (auto path : {ReportPath::Generic, ReportPath::BinarySymmetric}) {
    const auto all = soft_cover_report(cb, u, bsc, 10.0, path);
    CHECK(all.p2_mass == 0.0);
    CHECK(all.tv == Approx(all.pos_part_d1).epsilon(1e-12));

    const auto none = soft_cover_report(cb, u, bsc, -10.0, path);
    CHECK(none.p2_mass == Approx(1.0).epsilon(1e-12));
    CHECK(none.d1_max == 0.0);
    CHECK(none.epsilon_used == -10.0);
  }
}

TEST_CASE("soft_cover_report matches the straight-line oracle") {
  const auto u = FiniteDistribution::uniform(2);
  const auto bsc = binary_symmetric_channel(0.2);
  const auto cb = sample_codebook(u, 6, 0.9, 7);
  const double eps = gamma_delta(u, bsc, 0.9, 0.05).epsilon_star;
  const auto ref = oracle::report(cb, {0.5, 0.5}, oracle::rows_of(bsc), eps);
  for (auto path : {ReportPath::Generic, ReportPath::BinarySymmetric, ReportPath::Auto}) {
    const auto r = soft_cover_report(cb, u, bsc, eps, path);
    CHECK(std::abs(r.tv - ref.tv) <= 1e-12);
    CHECK(std::abs(r.p2_mass - ref.p2) <= 1e-12);
    CHECK(std::abs(r.d1_max - ref.d1_max) <= 1e-10);
    CHECK(std::abs(r.pos_part_d1 - ref.pos_d1) <= 1e-12);
  }
}

TEST_CASE("property: fast path agrees with the generic path") {
  std::mt19937_64 rng(37);
  const auto u = FiniteDistribution::uniform(2);
  for (int trial = 0; trial < 60; ++trial) {
    const double p = 0.01 + 0.48 * (rng() % 1000) / 1000.0;
    const auto bsc = binary_symmetric_channel(p);
    const int n = 2 + static_cast<int>(rng() % 9);
    const auto cb = sample_codebook_with_size(u, n, 1 + rng() % 200, rng());
    const double eps = -0.3 + 0.8 * (rng() % 1000) / 1000.0;
    const auto g = soft_cover_detail(cb, u, bsc, eps, ReportPath::Generic);
    const auto f = soft_cover_detail(cb, u, bsc, eps, ReportPath::BinarySymmetric);
    CHECK(std::abs(g.report.tv - f.report.tv) <= 1e-12);
    CHECK(std::abs(g.report.p2_mass - f.report.p2_mass) <= 1e-12);
    CHECK(std::abs(g.report.pos_part_d1 - f.report.pos_part_d1) <= 1e-12);
    CHECK(std::abs(g.report.d1_max - f.report.d1_max) <= 1e-9 * std::max(1.0, g.report.d1_max));
  }
  CHECK_THROWS_AS(soft_cover_report(make_codebook(2, 2, {1}), FiniteDistribution({0.3, 0.7}),
                                    binary_symmetric_channel(0.1), 0.1, ReportPath::BinarySymmetric),
                  Error);
}

TEST_CASE("property: decomposition identities on random codebooks") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t kx = 2 + rng() % 2, ky = 2 + rng() % 2;
    std::vector<std::vector<double>> w;
    for (std::size_t x = 0; x < kx; ++x) w.push_back(random_simplex(rng, ky));
    const FiniteDistribution qx(random_simplex(rng, kx));
    const Channel ch(w);
    const int n = 1 + static_cast<int>(rng() % 5);
    const auto cb = sample_codebook_with_size(qx, n, 1 + rng() % 40, rng());
    const double eps = -0.2 + 0.6 * (rng() % 1000) / 1000.0;
    const auto d = soft_cover_detail(cb, qx, ch, eps);
    double sum = 0;
    for (std::size_t y = 0; y < d.induced.size(); ++y) {
      CHECK(std::abs(d.typical[y] + d.atypical[y] - d.induced[y]) <= 1e-12);
      sum += d.induced[y];
    }
    CHECK(sum == Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(d.report.tv - d.tv_positive_part) <= 1e-12);
    CHECK(d.report.tv <= d.report.pos_part_d1 + d.report.p2_mass + 1e-12);
    CHECK(d.report.tv >= 0.0);
    CHECK(d.report.tv <= 1.0);
  }
}

TEST_CASE("expected typical-part term is at most one") {
  // Single-word codebooks: E_X[D_{C,1}(y)] <= 1 for every y, estimated by Monte Carlo.
  const FiniteDistribution qx({0.3, 0.7});
  const Channel ch({{0.8, 0.15, 0.05}, {0.1, 0.3, 0.6}});
  const int n = 3, trials = 4000;
  const double eps = 0.05;
  std::vector<double> mean(27, 0.0), sq(27, 0.0);
  std::mt19937_64 rng(43);
  for (int t = 0; t < trials; ++t) {
    const auto cb = sample_codebook_with_size(qx, n, 1, rng());
    const auto d = soft_cover_detail(cb, qx, ch, eps);
    for (std::size_t y = 0; y < 27; ++y) {
      const double v = d.typical[y] / d.target[y];
      mean[y] += v / trials;
      sq[y] += v * v / trials;
    }
  }
  for (std::size_t y = 0; y < 27; ++y) {
    const double se = std::sqrt(std::max(sq[y] - mean[y] * mean[y], 0.0) / trials);
    CHECK(mean[y] <= 1.0 + 3 * se + 1e-12);
  }
}

TEST_CASE("atypical_probability") {
  const auto u = FiniteDistribution::uniform(2);
  const auto bsc11 = binary_symmetric_channel(0.11);
  const auto prof = info_profile(u, bsc11);
  const double max_density = std::log2(1.78);
  CHECK(atypical_probability(u, bsc11, 15, max_density - prof.mutual_info_bits).exact_prob == 0.0);
  CHECK(atypical_probability(u, binary_symmetric_channel(0.5), 30, 0.01).exact_prob == 0.0);

  const auto r = atypical_probability(u, bsc11, 20, 0.1);
  CHECK(std::abs(r.exact_prob - kBsc011Atypical20) <= 1e-12);
  CHECK(std::abs(r.exact_prob - oracle::bsc_atypical(0.11, 20, 0.1)) <= 1e-12);
  CHECK(r.exact_prob <= std::exp2(r.chernoff_log2));
}

TEST_CASE("property: exact atypicality is below every Chernoff bound") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t kx = 2 + rng() % 2, ky = 2 + rng() % 2;
    std::vector<std::vector<double>> w;
    for (std::size_t x = 0; x < kx; ++x) w.push_back(random_simplex(rng, ky));
    const FiniteDistribution qx(random_simplex(rng, kx));
    const Channel ch(w);
    const int n = 5 + static_cast<int>(rng() % (kx * ky == 4 ? 30 : 8));
    const double eps = 0.01 + 0.3 * (rng() % 1000) / 1000.0;
    const auto r = atypical_probability(qx, ch, n, eps);
    CHECK(r.exact_prob >= 0.0);
    CHECK(r.exact_prob <= 1.0);
    CHECK(r.chernoff_log2 <= 0.0);
    CHECK(r.exact_prob <= std::exp2(r.chernoff_log2) * (1 + 1e-12));
    // Cross-check the convolution against the generic report on a single
    // word: p2_mass averaged over the input law is the same probability.
    if (n <= 6) {
      double avg = 0;
      const auto count = *sequence_count(kx, n);
      for (std::uint64_t x = 0; x < count; ++x) {
        const auto cb = make_codebook(n, kx, {x});
        avg += sequence_pmf(qx, cb.word(0)) * soft_cover_report(cb, qx, ch, eps).p2_mass;
      }
      CHECK(std::abs(avg - r.exact_prob) <= 1e-12);
    }
  }
}

TEST_CASE("berry_esseen_check") {
  const auto u = FiniteDistribution::uniform(2);
  const auto bsc11 = binary_symmetric_channel(0.11);
  const auto c = berry_esseen_check(u, bsc11, 100, 0.05);
  CHECK(c.holds);
  CHECK(c.exact <= c.bound);
  try {
    berry_esseen_check(u, binary_symmetric_channel(0.5), 10, 0.1);
    FAIL("expected ZeroDispersion");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroDispersion);
  }
}

TEST_CASE("zero target mass is reported") {
  // Word uses a symbol Q_X never emits, so it can reach an output Q_Y never sees.
  const FiniteDistribution qx({1.0, 0.0});
  const Channel ch({{1.0, 0.0}, {0.0, 1.0}});
  try {
    soft_cover_report(make_codebook(1, 2, {1}), qx, ch, 0.1, ReportPath::Generic);
    FAIL("expected ZeroTargetMass");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroTargetMass);
  }
}
