#include "net2rdm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "net2rdm/error.hpp"

namespace net2rdm {

namespace {

bool all_equal(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

// Signed sum in index order; signs are the low n bits of `mask` (bit set = flipped).
double flipped_sum(std::span<const double> v, std::uint64_t mask) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += ((mask >> i) & 1u) ? -v[i] : v[i];
  return s;
}

struct TailCounter {
  Alternative alternative;
  double observed;
  double tol;

  bool operator()(double stat) const {
    if (alternative == Alternative::greater) return stat >= observed - tol;
    return std::abs(stat) >= std::abs(observed) - tol;
  }
};

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::EmptyInput, "mean of an empty vector");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::LengthMismatch, "pearson: vectors differ in length");
  if (a.size() < 2) fail(ErrorCode::LengthMismatch, "pearson: need at least 2 values");
  if (all_equal(a) || all_equal(b)) fail(ErrorCode::ConstantInput, "pearson: constant input");

  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) fail(ErrorCode::ConstantInput, "pearson: zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::LengthMismatch, "spearman: vectors differ in length");
  if (a.size() < 3) fail(ErrorCode::LengthMismatch, "spearman: need at least 3 values");
  if (all_equal(a) || all_equal(b)) fail(ErrorCode::AllTied, "spearman: all values tied");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson(ra, rb);
}

double sign_flip_test(std::span<const double> values, Alternative alternative,
                      const PermutationScheme& scheme) {
  const std::size_t n = values.size();
  if (n < 2) fail(ErrorCode::TooFewSubjects, "sign-flip test needs at least 2 subjects");
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "sign-flip test on a non-finite value");
  }

  auto mode = scheme.mode;
  if (mode == PermutationScheme::Mode::automatic) {
    mode = n <= kAutoExactSubjects ? PermutationScheme::Mode::exact : PermutationScheme::Mode::monte_carlo;
  }

  double scale = 0.0;
  for (double v : values) scale += std::abs(v);
  const double observed = flipped_sum(values, 0);
  // Absorbs summation-order rounding so mathematically tied assignments count as ties.
  const TailCounter in_tail{alternative, observed, 1e-12 * scale};

  if (mode == PermutationScheme::Mode::exact) {
    if (n > kMaxExactSubjects) {
      fail(ErrorCode::InvalidArgument, "exact enumeration supports at most " +
                                           std::to_string(kMaxExactSubjects) + " subjects");
    }
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      if (in_tail(flipped_sum(values, mask))) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(total);
  }

  if (scheme.n_samples < kMinMonteCarloSamples) {
    fail(ErrorCode::InvalidArgument, "Monte-Carlo sign-flip needs at least " +
                                         std::to_string(kMinMonteCarloSamples) + " samples");
  }
  std::mt19937_64 rng(scheme.seed);
  std::vector<double> flipped(n);
  std::uint64_t count = 1;  // identity
  for (std::uint64_t s = 0; s < scheme.n_samples; ++s) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng();
      flipped[i] = (bits & 1u) ? -values[i] : values[i];
      bits >>= 1;
    }
    if (in_tail(flipped_sum(flipped, 0))) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(scheme.n_samples + 1);
}

double paired_difference_test(std::span<const double> a, std::span<const double> b,
                              const PermutationScheme& scheme) {
  if (a.size() != b.size()) fail(ErrorCode::LengthMismatch, "paired test: score vectors differ in length");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return sign_flip_test(diff, Alternative::two_sided, scheme);
}

std::vector<bool> fdr_bh(std::span<const double> p_values, double q) {
  if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::InvalidArgument, "FDR level q must lie in (0, 1)");
  for (double p : p_values) {
    if (!(p > 0.0 && p <= 1.0)) fail(ErrorCode::InvalidP, "p-value " + std::to_string(p) + " outside (0, 1]");
  }
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return p_values[x] < p_values[y]; });

  std::size_t k = 0;  // number of rejections
  for (std::size_t rank = m; rank >= 1; --rank) {
    const double threshold = static_cast<double>(rank) * q / static_cast<double>(m);
    if (p_values[order[rank - 1]] <= threshold) {
      k = rank;
      break;
    }
  }
  std::vector<bool> rejected(m, false);
  for (std::size_t r = 0; r < k; ++r) rejected[order[r]] = true;
  return rejected;
}

double sem(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) fail(ErrorCode::TooFewSubjects, "standard error needs at least 2 values");
  if (all_equal(values)) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return sd / std::sqrt(static_cast<double>(n));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace net2rdm
