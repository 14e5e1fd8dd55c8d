#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace net2rdm {

/// How sign-flip null distributions are formed.
///   exact       enumerate all 2^n assignments (n <= 20)
///   monte_carlo sample n_samples assignments plus the identity
///   automatic   exact when n <= 12, otherwise monte_carlo with n_samples
struct PermutationScheme {
  enum class Mode { automatic, exact, monte_carlo };

  Mode mode = Mode::automatic;
  std::uint64_t n_samples = 10'000;
  std::uint64_t seed = 0;

  static PermutationScheme exact() { return {Mode::exact, 10'000, 0}; }
  static PermutationScheme monte_carlo(std::uint64_t samples, std::uint64_t seed) {
    return {Mode::monte_carlo, samples, seed};
  }

  bool operator==(const PermutationScheme&) const = default;
};

inline constexpr std::size_t kMaxExactSubjects = 20;
inline constexpr std::size_t kAutoExactSubjects = 12;
inline constexpr std::uint64_t kMinMonteCarloSamples = 1000;

enum class Alternative { greater, two_sided };

double pearson(std::span<const double> a, std::span<const double> b);

/// Fractional ranks starting at 1; ties share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

double spearman(std::span<const double> a, std::span<const double> b);

/// Sign-flip permutation p-value for mean(values). The identity assignment is
/// always counted, so the result is never 0.
double sign_flip_test(std::span<const double> values, Alternative alternative,
                      const PermutationScheme& scheme);

/// Two-sided sign-flip test on a - b.
double paired_difference_test(std::span<const double> a, std::span<const double> b,
                              const PermutationScheme& scheme);

/// Benjamini-Hochberg step-up; result is in input order.
std::vector<bool> fdr_bh(std::span<const double> p_values, double q);

/// Standard error of the mean with the n-1 sample deviation.
double sem(std::span<const double> values);

double mean(std::span<const double> values);

/// Splits one seed into independent per-task seeds (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace net2rdm
