#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "softcover/info_measures.hpp"
#include "softcover/probability.hpp"

namespace softcover {

/// Resource limits for exact enumeration.
struct EngineCaps {
  std::uint64_t max_codewords = std::uint64_t{1} << 26;
  std::uint64_t max_space = std::uint64_t{1} << 24;  // |Y|^n (and |X|^n for histograms)
};

/// Sums of information densities within this slack of the threshold n(I + eps)
/// count as typical, so exact ties stay in the typical set despite rounding.
inline constexpr double kTypicalityTieTol = 1e-9;

struct Codebook {
  int n = 0;
  std::size_t input_size = 0;
  double rate_bits = 0.0;
  std::uint64_t seed = 0;
  /// Codewords as base-|X| sequence indices, first symbol most significant.
  std::vector<std::uint64_t> words;

  std::size_t size() const noexcept { return words.size(); }
  SequenceIndex word(std::size_t m) const {
    return SequenceIndex(n, input_size, words[m]);
  }
};

/// Number of codewords round(2^(n R)). Throws SizeOverflow above the cap.
std::uint64_t codebook_size(int n, double rate_bits, std::uint64_t cap);

/// M = round(2^(n R)) codewords, every symbol i.i.d. from qx, reproducible from `seed`.
Codebook sample_codebook(const FiniteDistribution& qx, int n, double rate_bits,
                         std::uint64_t seed, const EngineCaps& caps = {});

/// Same sampler with an explicit codebook size; rate_bits is set to log2(M)/n.
Codebook sample_codebook_with_size(const FiniteDistribution& qx, int n, std::uint64_t size,
                                   std::uint64_t seed, const EngineCaps& caps = {});

/// Codebook from explicit words (used by enumeration oracles and tests).
Codebook make_codebook(int n, std::size_t input_size, std::vector<std::uint64_t> words);

/// P_{Y^n|C}(y^n) = (1/M) sum_m W^n(y^n | x^n(m)) over all |Y|^n outputs.
std::vector<double> induced_distribution(const Codebook& cb, const Channel& ch,
                                         const EngineCaps& caps = {});

struct SoftCoverReport {
  double tv = 0.0;           // ||P_{Y^n|C} - Q_{Y^n}||
  double p2_mass = 0.0;      // mass of the atypical part P_{C,2}
  double d1_max = 0.0;       // max_y D_{C,1}(y)
  double pos_part_d1 = 0.0;  // sum_y Q(y) [D_{C,1}(y) - 1]_+
  double epsilon_used = 0.0;

  bool operator==(const SoftCoverReport&) const = default;
};

/// Report plus the vectors it was computed from.
struct SoftCoverDetail {
  SoftCoverReport report;
  double tv_positive_part = 0.0;  // sum_y Q(y) [D_C(y) - 1]_+
  std::vector<double> induced;    // P_{Y^n|C}
  std::vector<double> typical;    // P_{C,1}
  std::vector<double> atypical;   // P_{C,2}
  std::vector<double> target;     // Q_{Y^n}
};

enum class ReportPath {
  Auto,             // binary symmetric fast path when applicable, else generic
  Generic,          // pairwise enumeration over distinct codewords and outputs
  BinarySymmetric,  // Walsh-Hadamard convolution; BSC with uniform input only
};

/// True when the Walsh-Hadamard path applies: BSC with uniform input.
bool binary_symmetric_applicable(const FiniteDistribution& qx, const Channel& ch);

SoftCoverDetail soft_cover_detail(const Codebook& cb, const FiniteDistribution& qx,
                                  const Channel& ch, double epsilon,
                                  ReportPath path = ReportPath::Auto,
                                  const EngineCaps& caps = {});

SoftCoverReport soft_cover_report(const Codebook& cb, const FiniteDistribution& qx,
                                  const Channel& ch, double epsilon,
                                  ReportPath path = ReportPath::Auto,
                                  const EngineCaps& caps = {});

struct AtypicalityResult {
  double epsilon = 0.0;
  double exact_prob = 0.0;     // P(sum_i i(X_i;Y_i) > n(I + eps))
  double chernoff_log2 = 0.0;  // min over the alpha grid of -beta n, or 0 if no beta > 0
  double chernoff_alpha = 0.0;
};

/// Exact atypical-set probability by n-fold convolution of the law of the
/// information density, with support values merged at 1e-12.
AtypicalityResult atypical_probability(const FiniteDistribution& qx, const Channel& ch, int n,
                                       double epsilon);

struct BerryEsseenCheck {
  double bound = 0.0;
  double exact = 0.0;
  bool holds = false;
};

BerryEsseenCheck berry_esseen_check(const FiniteDistribution& qx, const Channel& ch, int n,
                                    double epsilon);

}  // namespace softcover
