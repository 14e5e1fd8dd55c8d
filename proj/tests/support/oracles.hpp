#pragma once

// Deliberately naive reference implementations. Nothing here calls into the
// library's numeric code; they only share the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "net2rdm/core_model.hpp"
#include "net2rdm/matrix.hpp"

namespace oracle {

using net2rdm::Matrix;

inline double naive_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// cov / (sd_a * sd_b), textbook form.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = naive_mean(a);
  const double mb = naive_mean(b);
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

// O(n^2) ranks: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> brute_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double x : v) {
      if (x < v[i]) less += 1;
      if (x == v[i]) equal += 1;
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(brute_ranks(a), brute_ranks(b));
}

inline std::vector<double> row_of(const Matrix& m, std::size_t r) {
  std::vector<double> out(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) out[c] = m(r, c);
  return out;
}

inline double correlation_distance(const std::vector<double>& x, const std::vector<double>& y) {
  return 1.0 - pearson(x, y);
}

inline double euclidean_distance(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

inline double cosine_distance(const std::vector<double>& x, const std::vector<double>& y) {
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  return 1.0 - dot / (std::sqrt(nx) * std::sqrt(ny));
}

// metric: 0 correlation, 1 euclidean, 2 cosine
inline Matrix rdm(const Matrix& act, int metric) {
  const std::size_t n = act.rows();
  Matrix out(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto x = row_of(act, i);
      const auto y = row_of(act, j);
      out(i, j) = metric == 0 ? correlation_distance(x, y)
                  : metric == 1 ? euclidean_distance(x, y)
                                : cosine_distance(x, y);
    }
  }
  return out;
}

inline std::vector<double> upper(const Matrix& m) {
  std::vector<double> out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

inline double signed_square(double x) { return x >= 0 ? x * x : -(x * x); }

// Counts every one of the 2^n sign assignments whose statistic reaches the
// observed one. `tol` absorbs rounding between algebraically equal sums.
inline double enumerate_sign_flips(const std::vector<double>& v, bool two_sided) {
  const std::size_t n = v.size();
  double scale = 0.0, observed = 0.0;
  for (double x : v) {
    scale += std::abs(x);
    observed += x;
  }
  const double tol = 1e-12 * scale;
  std::uint64_t hits = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t a = 0; a < total; ++a) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += ((a >> i) & 1u) ? -v[i] : v[i];
    const bool hit = two_sided ? std::abs(s) >= std::abs(observed) - tol : s >= observed - tol;
    if (hit) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

// Largest k with p_(k) <= k q / m; reject the k smallest.
inline std::vector<bool> step_up(const std::vector<double>& p, double q) {
  const std::size_t m = p.size();
  std::vector<double> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  double cut = -1.0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (sorted[k - 1] <= static_cast<double>(k) * q / static_cast<double>(m)) cut = sorted[k - 1];
  }
  std::vector<bool> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = p[i] <= cut;
  return out;
}

struct Ceiling {
  double lower;
  double upper;
};

// Leave-one-out and all-subject Spearman averaged over subjects, then signed-squared.
inline Ceiling noise_ceiling(const std::vector<Matrix>& subjects) {
  const std::size_t s = subjects.size();
  std::vector<std::vector<double>> u;
  for (const auto& m : subjects) u.push_back(upper(m));
  const std::size_t p = u[0].size();
  double lo = 0.0, hi = 0.0;
  for (std::size_t k = 0; k < s; ++k) {
    std::vector<double> others(p, 0.0), all(p, 0.0);
    for (std::size_t t = 0; t < s; ++t) {
      for (std::size_t e = 0; e < p; ++e) {
        all[e] += u[t][e] / static_cast<double>(s);
        if (t != k) others[e] += u[t][e] / static_cast<double>(s - 1);
      }
    }
    lo += spearman(u[k], others);
    hi += spearman(u[k], all);
  }
  return {signed_square(lo / static_cast<double>(s)), signed_square(hi / static_cast<double>(s))};
}

// Exhaustive active-set NNLS for two columns: try {}, {a}, {b}, {a,b} and keep
// the feasible candidate with the smallest residual.
inline std::vector<double> nnls2(const std::vector<double>& a, const std::vector<double>& b,
                                 const std::vector<double>& y) {
  double aa = 0, bb = 0, ab = 0, ay = 0, by = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    aa += a[i] * a[i];
    bb += b[i] * b[i];
    ab += a[i] * b[i];
    ay += a[i] * y[i];
    by += b[i] * y[i];
  }
  auto rss = [&](double wa, double wb) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double e = y[i] - wa * a[i] - wb * b[i];
      s += e * e;
    }
    return s;
  };
  std::vector<std::vector<double>> cand{{0.0, 0.0}};
  if (ay > 0) cand.push_back({ay / aa, 0.0});
  if (by > 0) cand.push_back({0.0, by / bb});
  const double det = aa * bb - ab * ab;
  const double wa = (bb * ay - ab * by) / det;
  const double wb = (aa * by - ab * ay) / det;
  if (wa >= 0 && wb >= 0) cand.push_back({wa, wb});
  return *std::min_element(cand.begin(), cand.end(),
                           [&](const auto& x, const auto& z) { return rss(x[0], x[1]) < rss(z[0], z[1]); });
}

// All voxels within r of each voxel, by plain distance check.
inline std::vector<std::vector<std::uint32_t>> spheres(const Matrix& xyz, double r) {
  std::vector<std::vector<std::uint32_t>> out(xyz.rows());
  for (std::size_t c = 0; c < xyz.rows(); ++c) {
    for (std::size_t v = 0; v < xyz.rows(); ++v) {
      const double dx = xyz(c, 0) - xyz(v, 0), dy = xyz(c, 1) - xyz(v, 1), dz = xyz(c, 2) - xyz(v, 2);
      if (std::sqrt(dx * dx + dy * dy + dz * dz) <= r) out[c].push_back(static_cast<std::uint32_t>(v));
    }
  }
  return out;
}

}  // namespace oracle
