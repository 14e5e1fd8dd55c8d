#include "net2rdm/rdm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "net2rdm/error.hpp"
#include "net2rdm/parallel.hpp"

namespace net2rdm {

std::string_view to_string(DissimilarityMetric metric) noexcept {
  switch (metric) {
    case DissimilarityMetric::correlation: return "correlation";
    case DissimilarityMetric::euclidean: return "euclidean";
    case DissimilarityMetric::cosine: return "cosine";
  }
  return "correlation";
}

DissimilarityMetric parse_metric(std::string_view name) {
  if (name == "correlation") return DissimilarityMetric::correlation;
  if (name == "euclidean") return DissimilarityMetric::euclidean;
  if (name == "cosine") return DissimilarityMetric::cosine;
  fail(ErrorCode::UnknownMetric, "unknown metric '" + std::string(name) + "'");
}

namespace {

// Per-row quantities computed once; pair kernels only read them.
struct RowStats {
  Matrix centered;           // rows minus their mean (correlation only)
  std::vector<double> norm;  // L2 norm of the (centered) row
};

RowStats prepare_rows(const Matrix& m, DissimilarityMetric metric) {
  const std::size_t n = m.rows();
  const std::size_t d = m.cols();
  if (n < 3) fail(ErrorCode::TooFewConditions, "need at least 3 conditions, got " + std::to_string(n));
  if (d < 1) fail(ErrorCode::InvalidArgument, "activation matrix has no features");

  RowStats stats;
  stats.norm.assign(n, 0.0);
  if (metric == DissimilarityMetric::correlation) {
    if (d < 2) fail(ErrorCode::InvalidArgument, "correlation metric needs at least 2 features");
    stats.centered = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = m.row(i);
      if (std::all_of(row.begin(), row.end(), [&](double v) { return v == row[0]; })) {
        fail(ErrorCode::ConstantRow, "row " + std::to_string(i) + " is constant");
      }
      double mean = 0.0;
      for (double v : row) mean += v;
      mean /= static_cast<double>(d);
      double ss = 0.0;
      auto out = stats.centered.row(i);
      for (std::size_t k = 0; k < d; ++k) {
        out[k] = row[k] - mean;
        ss += out[k] * out[k];
      }
      stats.norm[i] = std::sqrt(ss);
    }
  } else if (metric == DissimilarityMetric::cosine) {
    for (std::size_t i = 0; i < n; ++i) {
      double ss = 0.0;
      for (double v : m.row(i)) ss += v * v;
      if (ss == 0.0) fail(ErrorCode::ZeroNormRow, "row " + std::to_string(i) + " has zero norm");
      stats.norm[i] = std::sqrt(ss);
    }
  }
  return stats;
}

double pair_dissimilarity(const Matrix& m, const RowStats& stats, DissimilarityMetric metric,
                          std::size_t i, std::size_t j) {
  switch (metric) {
    case DissimilarityMetric::correlation: {
      const auto a = stats.centered.row(i);
      const auto b = stats.centered.row(j);
      double dot = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
      const double r = std::clamp(dot / (stats.norm[i] * stats.norm[j]), -1.0, 1.0);
      return 1.0 - r;
    }
    case DissimilarityMetric::cosine: {
      const auto a = m.row(i);
      const auto b = m.row(j);
      double dot = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
      const double s = std::clamp(dot / (stats.norm[i] * stats.norm[j]), -1.0, 1.0);
      return 1.0 - s;
    }
    case DissimilarityMetric::euclidean: {
      const auto a = m.row(i);
      const auto b = m.row(j);
      double ss = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        ss += diff * diff;
      }
      return std::sqrt(ss);
    }
  }
  return 0.0;
}

}  // namespace

Matrix compute_rdm_values(const Matrix& matrix, DissimilarityMetric metric, int workers) {
  const RowStats stats = prepare_rows(matrix, metric);
  const std::size_t n = matrix.rows();

  std::vector<std::uint32_t> pair_i;
  std::vector<std::uint32_t> pair_j;
  pair_i.reserve(n * (n - 1) / 2);
  pair_j.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      pair_i.push_back(static_cast<std::uint32_t>(i));
      pair_j.push_back(static_cast<std::uint32_t>(j));
    }
  }

  Matrix out(n, n, 0.0);
  const auto n_pairs = static_cast<std::int64_t>(pair_i.size());
  const int threads = resolve_workers(workers);
  (void)threads;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t p = 0; p < n_pairs; ++p) {
    const std::size_t i = pair_i[p];
    const std::size_t j = pair_j[p];
    const double v = pair_dissimilarity(matrix, stats, metric, i, j);
    out(i, j) = v;
    out(j, i) = v;
  }
  return out;
}

namespace serial {

Matrix compute_rdm_values(const Matrix& matrix, DissimilarityMetric metric) {
  const RowStats stats = prepare_rows(matrix, metric);
  const std::size_t n = matrix.rows();
  Matrix out(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = pair_dissimilarity(matrix, stats, metric, i, j);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace serial

Rdm compute_rdm(const Matrix& matrix, DissimilarityMetric metric, std::vector<std::string> condition_ids,
                int workers) {
  if (condition_ids.size() != matrix.rows()) {
    fail(ErrorCode::MismatchedStimulusCount, "matrix has " + std::to_string(matrix.rows()) + " rows but " +
                                                 std::to_string(condition_ids.size()) + " condition ids");
  }
  return Rdm::create(std::move(condition_ids), compute_rdm_values(matrix, metric, workers));
}

std::vector<double> flatten_upper(const Matrix& square) {
  const std::size_t n = square.rows();
  std::vector<double> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(square(i, j));
  }
  return out;
}

std::vector<double> flatten_upper(const Rdm& rdm) { return flatten_upper(rdm.values()); }

Matrix unflatten_upper(std::span<const double> upper, std::size_t n) {
  if (upper.size() != n * (n - 1) / 2) {
    fail(ErrorCode::LengthMismatch, "upper triangle length " + std::to_string(upper.size()) +
                                        " does not match n = " + std::to_string(n));
  }
  Matrix out(n, n, 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out(i, j) = upper[k];
      out(j, i) = upper[k];
      ++k;
    }
  }
  return out;
}

Rdm average_rdms(std::span<const Rdm> rdms) {
  if (rdms.empty()) fail(ErrorCode::EmptyInput, "cannot average an empty list of RDMs");
  const auto& ids = rdms.front().condition_ids();
  for (const auto& r : rdms) {
    if (r.condition_ids() != ids) fail(ErrorCode::ConditionMismatch, "RDMs have different condition lists");
  }
  const std::size_t n = ids.size();
  Matrix sum(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (const auto& r : rdms) s += r(i, j);
      s /= static_cast<double>(rdms.size());
      sum(i, j) = s;
      sum(j, i) = s;
    }
  }
  return Rdm::create(ids, std::move(sum));
}

}  // namespace net2rdm
