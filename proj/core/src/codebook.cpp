#include "softcover/codebook.hpp"

#include "softcover/exponents.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace softcover {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t space_size(std::size_t alphabet_size, int n, std::uint64_t cap,
                         const char* what) {
  const auto count = sequence_count(alphabet_size, n);
  if (!count || *count > cap) {
    throw Error(Errc::SpaceTooLarge, std::string(what) + " space exceeds the enumeration cap at n=" +
                                         std::to_string(n));
  }
  return *count;
}

// Inverse-CDF draw from a 53-bit uniform; deterministic for a given engine state.
class SymbolSampler {
 public:
  explicit SymbolSampler(const FiniteDistribution& dist) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      acc += dist[i];
      cumulative_.push_back(acc);
      if (dist[i] > 0.0) last_positive_ = i;
    }
  }

  std::size_t operator()(std::mt19937_64& rng) const {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    for (std::size_t i = 0; i < cumulative_.size(); ++i) {
      if (u < cumulative_[i]) return i;
    }
    return last_positive_;
  }

 private:
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

struct WordCount {
  std::uint64_t word;
  double count;
};

std::vector<WordCount> distinct_words(const Codebook& cb) {
  std::vector<std::uint64_t> sorted = cb.words;
  std::sort(sorted.begin(), sorted.end());
  std::vector<WordCount> out;
  for (std::uint64_t w : sorted) {
    if (!out.empty() && out.back().word == w) {
      out.back().count += 1.0;
    } else {
      out.push_back({w, 1.0});
    }
  }
  return out;
}

// Visits every output sequence with W^n(y|x) > 0 for one input word, reporting
// the output index, W^n(y|x) and the summed information density.
template <class Visit>
class OutputWalker {
 public:
  OutputWalker(const Channel& ch, const std::vector<std::vector<double>>& iota,
               std::vector<std::size_t> symbols, Visit& visit)
      : ch_(ch), iota_(iota), symbols_(std::move(symbols)), visit_(visit) {}

  void run() { descend(0, 0, 1.0, 0.0); }

 private:
  void descend(std::size_t depth, std::uint64_t index, double prob, double info) {
    if (depth == symbols_.size()) {
      visit_(index, prob, info);
      return;
    }
    const std::size_t x = symbols_[depth];
    const std::size_t ky = ch_.output_size();
    for (std::size_t y = 0; y < ky; ++y) {
      const double w = ch_(x, y);
      if (w == 0.0) continue;
      descend(depth + 1, index * ky + y, prob * w, info + iota_[x][y]);
    }
  }

  const Channel& ch_;
  const std::vector<std::vector<double>>& iota_;
  std::vector<std::size_t> symbols_;
  Visit& visit_;
};

std::vector<std::vector<double>> density_table(const FiniteDistribution& qx, const Channel& ch) {
  const auto qy = output_distribution(qx, ch);
  std::vector<std::vector<double>> iota(ch.input_size(), std::vector<double>(ch.output_size()));
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    for (std::size_t y = 0; y < ch.output_size(); ++y) {
      iota[x][y] = (ch(x, y) > 0.0 && qy[y] > 0.0) ? std::log2(ch(x, y) / qy[y]) : -kInf;
    }
  }
  return iota;
}

void walsh_hadamard(std::vector<double>& a) {
  const std::size_t size = a.size();
  for (std::size_t h = 1; h < size; h <<= 1) {
    for (std::size_t i = 0; i < size; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double u = a[j];
        const double v = a[j + h];
        a[j] = u + v;
        a[j + h] = u - v;
      }
    }
  }
}

// (1/M) (counts * kernel) over Z_2^n; `counts_hat` is already transformed.
std::vector<double> xor_convolve(const std::vector<double>& counts_hat,
                                 std::vector<double> kernel, double codebook_size) {
  walsh_hadamard(kernel);
  for (std::size_t i = 0; i < kernel.size(); ++i) kernel[i] *= counts_hat[i];
  walsh_hadamard(kernel);
  const double scale = 1.0 / (static_cast<double>(kernel.size()) * codebook_size);
  for (double& v : kernel) v = std::max(v * scale, 0.0);
  return kernel;
}

void check_codebook(const Codebook& cb, const Channel& ch) {
  if (cb.words.empty()) throw Error(Errc::InvalidArgument, "codebook is empty");
  if (cb.input_size != ch.input_size()) {
    throw Error(Errc::AlphabetMismatch, "codebook alphabet does not match channel input");
  }
}

SoftCoverDetail generic_detail(const Codebook& cb, const FiniteDistribution& qx,
                               const Channel& ch, double threshold, const EngineCaps& caps) {
  const std::uint64_t space = space_size(ch.output_size(), cb.n, caps.max_space, "output");
  const auto iota = density_table(qx, ch);
  SoftCoverDetail d;
  d.induced.assign(space, 0.0);
  d.typical.assign(space, 0.0);
  d.atypical.assign(space, 0.0);
  for (const auto& [word, count] : distinct_words(cb)) {
    auto visit = [&, count = count](std::uint64_t y, double prob, double info) {
      const double mass = count * prob;
      d.induced[y] += mass;
      if (info <= threshold) {
        d.typical[y] += mass;
      } else {
        d.atypical[y] += mass;
      }
    };
    OutputWalker walker(ch, iota, SequenceIndex(cb.n, cb.input_size, word).decode(), visit);
    walker.run();
  }
  const double inv_m = 1.0 / static_cast<double>(cb.size());
  for (std::uint64_t y = 0; y < space; ++y) {
    d.induced[y] *= inv_m;
    d.typical[y] *= inv_m;
    d.atypical[y] *= inv_m;
  }
  return d;
}

SoftCoverDetail binary_symmetric_detail(const Codebook& cb, double crossover, double threshold,
                                        const EngineCaps& caps) {
  const std::uint64_t space = space_size(2, cb.n, caps.max_space, "output");
  std::vector<double> counts(space, 0.0);
  for (std::uint64_t w : cb.words) counts[w] += 1.0;
  walsh_hadamard(counts);

  // Kernel over the noise pattern z = x xor y; with uniform input Q_Y is
  // uniform, so i(x;y) depends on z only.
  const double flip_info = crossover > 0.0 ? std::log2(2.0 * crossover) : -kInf;
  const double keep_info = crossover < 1.0 ? std::log2(2.0 * (1.0 - crossover)) : -kInf;
  const int n = cb.n;
  std::vector<double> by_weight(static_cast<std::size_t>(n) + 1);
  std::vector<bool> typical_weight(static_cast<std::size_t>(n) + 1);
  for (int w = 0; w <= n; ++w) {
    by_weight[w] = std::pow(crossover, w) * std::pow(1.0 - crossover, n - w);
    double info = 0.0;
    if (w > 0) info += w * flip_info;
    if (w < n) info += (n - w) * keep_info;
    typical_weight[w] = info <= threshold;
  }
  std::vector<double> typical_kernel(space), atypical_kernel(space), kernel(space);
  for (std::uint64_t z = 0; z < space; ++z) {
    const int w = std::popcount(z);
    kernel[z] = by_weight[w];
    (typical_weight[w] ? typical_kernel : atypical_kernel)[z] = by_weight[w];
  }
  const double m = static_cast<double>(cb.size());
  SoftCoverDetail d;
  d.induced = xor_convolve(counts, std::move(kernel), m);
  d.typical = xor_convolve(counts, std::move(typical_kernel), m);
  d.atypical = xor_convolve(counts, std::move(atypical_kernel), m);
  return d;
}

}  // namespace

std::uint64_t codebook_size(int n, double rate_bits, std::uint64_t cap) {
  if (n < 1) throw Error(Errc::InvalidArgument, "blocklength must be positive");
  if (!(rate_bits > 0.0)) throw Error(Errc::InvalidRate, "rate must be positive");
  const double exact = std::exp2(static_cast<double>(n) * rate_bits);
  if (!(exact < static_cast<double>(cap) + 0.5)) {
    throw Error(Errc::SizeOverflow, "codebook size 2^(nR) exceeds the cap at n=" +
                                        std::to_string(n));
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(exact)));
}

Codebook sample_codebook(const FiniteDistribution& qx, int n, double rate_bits,
                         std::uint64_t seed, const EngineCaps& caps) {
  Codebook cb = sample_codebook_with_size(qx, n, codebook_size(n, rate_bits, caps.max_codewords),
                                          seed, caps);
  cb.rate_bits = rate_bits;
  return cb;
}

Codebook sample_codebook_with_size(const FiniteDistribution& qx, int n, std::uint64_t size,
                                   std::uint64_t seed, const EngineCaps& caps) {
  if (n < 1) throw Error(Errc::InvalidArgument, "blocklength must be positive");
  if (size < 1) throw Error(Errc::InvalidArgument, "codebook needs at least one word");
  if (size > caps.max_codewords) throw Error(Errc::SizeOverflow, "codebook size exceeds the cap");
  if (!sequence_count(qx.size(), n)) {
    throw Error(Errc::SpaceTooLarge, "input sequences do not fit in 64-bit indices");
  }
  Codebook cb;
  cb.n = n;
  cb.input_size = qx.size();
  cb.rate_bits = std::log2(static_cast<double>(size)) / n;
  cb.seed = seed;
  cb.words.resize(size);
  std::mt19937_64 rng(seed);
  const SymbolSampler draw(qx);
  for (auto& word : cb.words) {
    std::uint64_t value = 0;
    for (int i = 0; i < n; ++i) value = value * qx.size() + draw(rng);
    word = value;
  }
  return cb;
}

Codebook make_codebook(int n, std::size_t input_size, std::vector<std::uint64_t> words) {
  if (n < 1) throw Error(Errc::InvalidArgument, "blocklength must be positive");
  const auto count = sequence_count(input_size, n);
  for (std::uint64_t w : words) {
    if (count && w >= *count) throw Error(Errc::InvalidArgument, "codeword index out of range");
  }
  Codebook cb;
  cb.n = n;
  cb.input_size = input_size;
  cb.rate_bits = words.empty() ? 0.0 : std::log2(static_cast<double>(words.size())) / n;
  cb.words = std::move(words);
  return cb;
}

std::vector<double> induced_distribution(const Codebook& cb, const Channel& ch,
                                         const EngineCaps& caps) {
  check_codebook(cb, ch);
  const std::uint64_t out_space = space_size(ch.output_size(), cb.n, caps.max_space, "output");
  const auto in_space = sequence_count(ch.input_size(), cb.n);
  const double inv_m = 1.0 / static_cast<double>(cb.size());

  if (!in_space || *in_space > caps.max_space) {
    std::vector<double> pmf(out_space, 0.0);
    const std::vector<std::vector<double>> iota(ch.input_size(),
                                                std::vector<double>(ch.output_size(), 0.0));
    for (const auto& [word, count] : distinct_words(cb)) {
      auto visit = [&, count = count](std::uint64_t y, double prob, double) {
        pmf[y] += count * prob * inv_m;
      };
      OutputWalker walker(ch, iota, SequenceIndex(cb.n, cb.input_size, word).decode(), visit);
      walker.run();
    }
    return pmf;
  }

  // Histogram over X^n, then apply W along one coordinate at a time. After
  // step i the first i+1 digits index outputs and the rest index inputs.
  std::vector<double> tensor(*in_space, 0.0);
  for (std::uint64_t w : cb.words) tensor[w] += inv_m;
  const std::size_t kx = ch.input_size();
  const std::size_t ky = ch.output_size();
  std::uint64_t outer = 1;
  std::uint64_t inner = *in_space / kx;
  for (int axis = 0; axis < cb.n; ++axis) {
    std::vector<double> next(outer * ky * inner, 0.0);
    for (std::uint64_t o = 0; o < outer; ++o) {
      for (std::size_t x = 0; x < kx; ++x) {
        const double* src = tensor.data() + (o * kx + x) * inner;
        for (std::size_t y = 0; y < ky; ++y) {
          const double w = ch(x, y);
          if (w == 0.0) continue;
          double* dst = next.data() + (o * ky + y) * inner;
          for (std::uint64_t i = 0; i < inner; ++i) dst[i] += w * src[i];
        }
      }
    }
    tensor = std::move(next);
    outer *= ky;
    inner = axis + 1 < cb.n ? inner / kx : 1;
  }
  return tensor;
}

bool binary_symmetric_applicable(const FiniteDistribution& qx, const Channel& ch) {
  return bsc_crossover(ch).has_value() && qx.size() == 2 && qx[0] == 0.5 && qx[1] == 0.5;
}

SoftCoverDetail soft_cover_detail(const Codebook& cb, const FiniteDistribution& qx,
                                  const Channel& ch, double epsilon, ReportPath path,
                                  const EngineCaps& caps) {
  check_codebook(cb, ch);
  if (!(qx.alphabet() == ch.input())) {
    throw Error(Errc::AlphabetMismatch, "input distribution does not match channel input");
  }
  const double info = info_profile(qx, ch).mutual_info_bits;
  const double threshold = cb.n * (info + epsilon) + kTypicalityTieTol;

  const bool symmetric = binary_symmetric_applicable(qx, ch);
  if (path == ReportPath::BinarySymmetric && !symmetric) {
    throw Error(Errc::InvalidArgument, "binary symmetric path needs a BSC with uniform input");
  }
  SoftCoverDetail d = (path == ReportPath::Generic || !symmetric)
                          ? generic_detail(cb, qx, ch, threshold, caps)
                          : binary_symmetric_detail(cb, *bsc_crossover(ch), threshold, caps);
  d.target = product_pmf(output_distribution(qx, ch), cb.n);

  auto& r = d.report;
  r.epsilon_used = epsilon;
  double abs_sum = 0.0;
  double p2 = 0.0;
  for (std::size_t y = 0; y < d.target.size(); ++y) {
    const double q = d.target[y];
    const double p = d.induced[y];
    if (std::abs(d.typical[y] + d.atypical[y] - p) > 1e-12) {
      throw std::logic_error("typical/atypical split does not recombine");
    }
    abs_sum += std::abs(p - q);
    p2 += d.atypical[y];
    if (q == 0.0) {
      if (p > 0.0) throw Error(Errc::ZeroTargetMass, "induced mass where Q_{Y^n} vanishes");
      continue;
    }
    d.tv_positive_part += q * std::max(p / q - 1.0, 0.0);
    r.pos_part_d1 += q * std::max(d.typical[y] / q - 1.0, 0.0);
    r.d1_max = std::max(r.d1_max, d.typical[y] / q);
  }
  r.tv = std::clamp(0.5 * abs_sum, 0.0, 1.0);
  r.p2_mass = std::clamp(p2, 0.0, 1.0);
  return d;
}

SoftCoverReport soft_cover_report(const Codebook& cb, const FiniteDistribution& qx,
                                  const Channel& ch, double epsilon, ReportPath path,
                                  const EngineCaps& caps) {
  return soft_cover_detail(cb, qx, ch, epsilon, path, caps).report;
}

AtypicalityResult atypical_probability(const FiniteDistribution& qx, const Channel& ch, int n,
                                       double epsilon) {
  if (n < 1) throw Error(Errc::InvalidArgument, "blocklength must be positive");
  constexpr double kMergeTol = 1e-12;
  constexpr std::size_t kMaxAtoms = std::size_t{1} << 22;
  const auto law = information_density_law(qx, ch, kMergeTol);
  const auto profile = info_profile(qx, ch);

  std::vector<std::pair<double, double>> sums{{0.0, 1.0}};
  std::vector<std::pair<double, double>> next;
  for (int step = 0; step < n; ++step) {
    next.clear();
    next.reserve(sums.size() * law.values.size());
    for (const auto& [v, p] : sums) {
      for (std::size_t j = 0; j < law.values.size(); ++j) {
        next.emplace_back(v + law.values[j], p * law.probs[j]);
      }
    }
    std::sort(next.begin(), next.end());
    sums.clear();
    for (const auto& atom : next) {
      if (!sums.empty() && atom.first - sums.back().first <= kMergeTol) {
        sums.back().second += atom.second;
      } else {
        sums.push_back(atom);
      }
    }
    if (sums.size() > kMaxAtoms) {
      throw Error(Errc::SpaceTooLarge, "information-density sum has too many support points at n=" +
                                           std::to_string(n));
    }
  }

  AtypicalityResult out;
  out.epsilon = epsilon;
  const double threshold = n * (profile.mutual_info_bits + epsilon) + kTypicalityTieTol;
  for (const auto& [v, p] : sums) {
    if (v > threshold) out.exact_prob += p;
  }
  out.exact_prob = std::clamp(out.exact_prob, 0.0, 1.0);

  const DependenceDivergence dalpha(qx, ch);
  for (int k = 0; k <= 240; ++k) {
    const double alpha = 1.0 + std::pow(10.0, -3.0 + 6.0 * k / 240.0);
    const double beta = beta_exponent(profile, dalpha(alpha), alpha, epsilon);
    if (-beta * n < out.chernoff_log2) {
      out.chernoff_log2 = -beta * n;
      out.chernoff_alpha = alpha;
    }
  }
  return out;
}

BerryEsseenCheck berry_esseen_check(const FiniteDistribution& qx, const Channel& ch, int n,
                                    double epsilon) {
  BerryEsseenCheck out;
  out.bound = berry_esseen_bound(info_profile(qx, ch), n, epsilon);
  out.exact = atypical_probability(qx, ch, n, epsilon).exact_prob;
  out.holds = out.exact <= out.bound;
  return out;
}

}  // namespace softcover
