#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "softcover/errors.hpp"

namespace softcover {

/// A finite symbol set, optionally with display labels.
class Alphabet {
 public:
  explicit Alphabet(std::size_t size);
  Alphabet(std::size_t size, std::vector<std::string> labels);

  std::size_t size() const noexcept { return size_; }
  const std::optional<std::vector<std::string>>& labels() const noexcept { return labels_; }

  /// Alphabets compare by size; labels are cosmetic.
  bool operator==(const Alphabet& other) const noexcept { return size_ == other.size_; }

 private:
  std::size_t size_;
  std::optional<std::vector<std::string>> labels_;
};

/// Probability vector over an Alphabet.
///
/// Construction accepts vectors whose sum is within kIngestTolerance of one and
/// renormalizes them, so after construction the entries sum to one up to
/// rounding. Use make_distribution() for arbitrary non-negative weights.
class FiniteDistribution {
 public:
  static constexpr double kIngestTolerance = 1e-9;

  explicit FiniteDistribution(std::vector<double> probs);
  FiniteDistribution(Alphabet alphabet, std::vector<double> probs);

  static FiniteDistribution uniform(std::size_t size);
  static FiniteDistribution point_mass(std::size_t size, std::size_t symbol);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  Alphabet alphabet_;
  std::vector<double> probs_;
};

/// Row-stochastic conditional pmf, rows[x][y] = W(y|x).
class Channel {
 public:
  explicit Channel(std::vector<std::vector<double>> rows);
  Channel(Alphabet input, Alphabet output, std::vector<std::vector<double>> rows);

  const Alphabet& input() const noexcept { return input_; }
  const Alphabet& output() const noexcept { return output_; }
  std::size_t input_size() const noexcept { return input_.size(); }
  std::size_t output_size() const noexcept { return output_.size(); }

  double operator()(std::size_t x, std::size_t y) const { return rows_[x][y]; }
  std::span<const double> row(std::size_t x) const { return rows_[x]; }

 private:
  Alphabet input_;
  Alphabet output_;
  std::vector<std::vector<double>> rows_;
};

Channel binary_symmetric_channel(double crossover);
Channel binary_erasure_channel(double erasure);
Channel noiseless_channel(std::size_t k);

/// If `ch` is a binary symmetric channel, its crossover probability.
std::optional<double> bsc_crossover(const Channel& ch, double tol = 0.0);

/// Number of sequences alphabet_size^n, or nullopt if it does not fit in 64 bits.
std::optional<std::uint64_t> sequence_count(std::size_t alphabet_size, int n);

/// A length-n sequence over an alphabet encoded as a base-|alphabet| integer.
/// The first symbol is the most significant digit.
class SequenceIndex {
 public:
  SequenceIndex(int n, std::size_t alphabet_size, std::uint64_t value);

  static SequenceIndex encode(std::span<const std::size_t> symbols, std::size_t alphabet_size);

  int n() const noexcept { return n_; }
  std::size_t alphabet_size() const noexcept { return k_; }
  std::uint64_t value() const noexcept { return value_; }

  std::vector<std::size_t> decode() const;
  std::size_t symbol(int position) const;

 private:
  int n_;
  std::size_t k_;
  std::uint64_t value_;
};

FiniteDistribution make_distribution(std::span<const double> weights);

/// Q_Y(y) = sum_x Q_X(x) W(y|x).
FiniteDistribution output_distribution(const FiniteDistribution& qx, const Channel& ch);

/// Q_{X,Y} flattened row-major (x major, y minor).
FiniteDistribution joint_distribution(const FiniteDistribution& qx, const Channel& ch);

/// Q_X(x) Q_Y(y) flattened the same way as joint_distribution.
FiniteDistribution product_distribution(const FiniteDistribution& qx, const Channel& ch);

/// Probability of a sequence under the memoryless extension of `dist`.
double sequence_pmf(const FiniteDistribution& dist, const SequenceIndex& seq);

/// Memoryless extension of `dist` over all |alphabet|^n sequences.
std::vector<double> product_pmf(const FiniteDistribution& dist, int n);

/// Half the L1 distance.
double total_variation(std::span<const double> p, std::span<const double> q);

/// sum_i [p_i - q_i]_+ ; equals total_variation for probability vectors.
double positive_part_distance(std::span<const double> p, std::span<const double> q);

}  // namespace softcover
