#include "softcover/probability.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace softcover {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::ZeroMass: return "ZeroMass";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::AlphabetMismatch: return "AlphabetMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::UndefinedDensity: return "UndefinedDensity";
    case Errc::SupportViolation: return "SupportViolation";
    case Errc::DomainError: return "DomainError";
    case Errc::RateTooLow: return "RateTooLow";
    case Errc::ZeroDispersion: return "ZeroDispersion";
    case Errc::InvalidRate: return "InvalidRate";
    case Errc::SizeOverflow: return "SizeOverflow";
    case Errc::SpaceTooLarge: return "SpaceTooLarge";
    case Errc::ZeroTargetMass: return "ZeroTargetMass";
    case Errc::DegenerateFit: return "DegenerateFit";
  }
  return "Unknown";
}

Alphabet::Alphabet(std::size_t size) : size_(size) {
  if (size == 0) throw Error(Errc::InvalidArgument, "alphabet size must be at least 1");
}

Alphabet::Alphabet(std::size_t size, std::vector<std::string> labels) : Alphabet(size) {
  if (labels.size() != size) {
    throw Error(Errc::LengthMismatch, "alphabet labels must have one entry per symbol");
  }
  labels_ = std::move(labels);
}

namespace {

void check_and_normalize(std::vector<double>& probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(Errc::NegativeWeight, "probabilities must be finite and non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > FiniteDistribution::kIngestTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << sum << ", not 1";
    throw Error(Errc::NotNormalized, os.str());
  }
  if (sum != 1.0) {
    for (double& p : probs) p /= sum;
  }
}

}  // namespace

FiniteDistribution::FiniteDistribution(std::vector<double> probs)
    : alphabet_(probs.size()), probs_(std::move(probs)) {
  check_and_normalize(probs_);
}

FiniteDistribution::FiniteDistribution(Alphabet alphabet, std::vector<double> probs)
    : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
  if (probs_.size() != alphabet_.size()) {
    throw Error(Errc::LengthMismatch, "probability vector length differs from alphabet size");
  }
  check_and_normalize(probs_);
}

FiniteDistribution FiniteDistribution::uniform(std::size_t size) {
  return FiniteDistribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

FiniteDistribution FiniteDistribution::point_mass(std::size_t size, std::size_t symbol) {
  if (symbol >= size) throw Error(Errc::InvalidArgument, "point mass symbol out of range");
  std::vector<double> p(size, 0.0);
  p[symbol] = 1.0;
  return FiniteDistribution(std::move(p));
}

Channel::Channel(std::vector<std::vector<double>> rows)
    : input_(rows.size()), output_(rows.empty() ? 0 : rows.front().size()) {
  *this = Channel(input_, output_, std::move(rows));
}

Channel::Channel(Alphabet input, Alphabet output, std::vector<std::vector<double>> rows)
    : input_(std::move(input)), output_(std::move(output)), rows_(std::move(rows)) {
  if (rows_.size() != input_.size()) {
    throw Error(Errc::LengthMismatch, "channel needs one row per input symbol");
  }
  for (auto& row : rows_) {
    if (row.size() != output_.size()) {
      throw Error(Errc::LengthMismatch, "channel row length differs from output alphabet size");
    }
    check_and_normalize(row);
  }
}

Channel binary_symmetric_channel(double crossover) {
  if (!(crossover >= 0.0 && crossover <= 1.0)) {
    throw Error(Errc::InvalidArgument, "BSC crossover must lie in [0, 1]");
  }
  return Channel({{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}});
}

Channel binary_erasure_channel(double erasure) {
  if (!(erasure >= 0.0 && erasure <= 1.0)) {
    throw Error(Errc::InvalidArgument, "BEC erasure probability must lie in [0, 1]");
  }
  return Channel(Alphabet(2), Alphabet(3, {"0", "e", "1"}),
                 {{1.0 - erasure, erasure, 0.0}, {0.0, erasure, 1.0 - erasure}});
}

Channel noiseless_channel(std::size_t k) {
  std::vector<std::vector<double>> rows(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) rows[i][i] = 1.0;
  return Channel(std::move(rows));
}

std::optional<double> bsc_crossover(const Channel& ch, double tol) {
  if (ch.input_size() != 2 || ch.output_size() != 2) return std::nullopt;
  const double p = ch(0, 1);
  if (std::abs(ch(1, 0) - p) > tol) return std::nullopt;
  return p;
}

std::optional<std::uint64_t> sequence_count(std::size_t alphabet_size, int n) {
  if (n < 0) return std::nullopt;
  std::uint64_t count = 1;
  for (int i = 0; i < n; ++i) {
    if (alphabet_size != 0 && count > UINT64_MAX / alphabet_size) return std::nullopt;
    count *= alphabet_size;
  }
  return count;
}

SequenceIndex::SequenceIndex(int n, std::size_t alphabet_size, std::uint64_t value)
    : n_(n), k_(alphabet_size), value_(value) {
  if (n < 0 || alphabet_size == 0) throw Error(Errc::InvalidArgument, "invalid sequence shape");
  const auto count = sequence_count(alphabet_size, n);
  if (count && value >= *count) throw Error(Errc::InvalidArgument, "sequence index out of range");
}

SequenceIndex SequenceIndex::encode(std::span<const std::size_t> symbols,
                                    std::size_t alphabet_size) {
  std::uint64_t value = 0;
  for (std::size_t s : symbols) {
    if (s >= alphabet_size) throw Error(Errc::InvalidArgument, "symbol outside alphabet");
    value = value * alphabet_size + s;
  }
  return SequenceIndex(static_cast<int>(symbols.size()), alphabet_size, value);
}

std::vector<std::size_t> SequenceIndex::decode() const {
  std::vector<std::size_t> out(static_cast<std::size_t>(n_));
  std::uint64_t v = value_;
  for (int i = n_ - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(v % k_);
    v /= k_;
  }
  return out;
}

std::size_t SequenceIndex::symbol(int position) const {
  if (position < 0 || position >= n_) throw Error(Errc::InvalidArgument, "position out of range");
  std::uint64_t v = value_;
  for (int i = n_ - 1; i > position; --i) v /= k_;
  return static_cast<std::size_t>(v % k_);
}

FiniteDistribution make_distribution(std::span<const double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(Errc::NegativeWeight, "weights must be finite and non-negative");
    }
    sum += w;
  }
  if (weights.empty() || sum <= 0.0) throw Error(Errc::ZeroMass, "weights have zero total mass");
  std::vector<double> probs(weights.begin(), weights.end());
  if (sum != 1.0) {
    for (double& p : probs) p /= sum;
  }
  return FiniteDistribution(std::move(probs));
}

FiniteDistribution output_distribution(const FiniteDistribution& qx, const Channel& ch) {
  if (!(qx.alphabet() == ch.input())) {
    throw Error(Errc::AlphabetMismatch, "input distribution does not match channel input");
  }
  std::vector<double> qy(ch.output_size(), 0.0);
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    for (std::size_t y = 0; y < ch.output_size(); ++y) qy[y] += qx[x] * ch(x, y);
  }
  return FiniteDistribution(ch.output(), std::move(qy));
}

FiniteDistribution joint_distribution(const FiniteDistribution& qx, const Channel& ch) {
  if (!(qx.alphabet() == ch.input())) {
    throw Error(Errc::AlphabetMismatch, "input distribution does not match channel input");
  }
  std::vector<double> joint;
  joint.reserve(ch.input_size() * ch.output_size());
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    for (std::size_t y = 0; y < ch.output_size(); ++y) joint.push_back(qx[x] * ch(x, y));
  }
  return FiniteDistribution(std::move(joint));
}

FiniteDistribution product_distribution(const FiniteDistribution& qx, const Channel& ch) {
  const auto qy = output_distribution(qx, ch);
  std::vector<double> prod;
  prod.reserve(ch.input_size() * ch.output_size());
  for (std::size_t x = 0; x < ch.input_size(); ++x) {
    for (std::size_t y = 0; y < ch.output_size(); ++y) prod.push_back(qx[x] * qy[y]);
  }
  return FiniteDistribution(std::move(prod));
}

double sequence_pmf(const FiniteDistribution& dist, const SequenceIndex& seq) {
  if (seq.alphabet_size() != dist.size()) {
    throw Error(Errc::AlphabetMismatch, "sequence alphabet does not match distribution");
  }
  double p = 1.0;
  std::uint64_t v = seq.value();
  for (int i = 0; i < seq.n(); ++i) {
    p *= dist[static_cast<std::size_t>(v % dist.size())];
    v /= dist.size();
  }
  return p;
}

std::vector<double> product_pmf(const FiniteDistribution& dist, int n) {
  std::vector<double> pmf{1.0};
  for (int i = 0; i < n; ++i) {
    std::vector<double> next;
    next.reserve(pmf.size() * dist.size());
    for (double p : pmf) {
      for (double q : dist.probs()) next.push_back(p * q);
    }
    pmf = std::move(next);
  }
  return pmf;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(Errc::LengthMismatch, "TV arguments differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

double positive_part_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(Errc::LengthMismatch, "arguments differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::max(p[i] - q[i], 0.0);
  return sum;
}

}  // namespace softcover
