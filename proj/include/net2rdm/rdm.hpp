#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "net2rdm/core_model.hpp"

namespace net2rdm {

enum class DissimilarityMetric { correlation, euclidean, cosine };

std::string_view to_string(DissimilarityMetric metric) noexcept;
/// Throws Error(UnknownMetric) for anything but correlation/euclidean/cosine.
DissimilarityMetric parse_metric(std::string_view name);

/// Pairwise dissimilarities between the rows of `matrix`. Pairs are split
/// statically across `workers` OpenMP threads (0 = default pool size); each
/// pair is computed sequentially so the output does not depend on `workers`.
Rdm compute_rdm(const Matrix& matrix, DissimilarityMetric metric,
                std::vector<std::string> condition_ids, int workers = 0);

/// Dissimilarity values only, without wrapping in an Rdm. Same preconditions
/// and errors as compute_rdm.
Matrix compute_rdm_values(const Matrix& matrix, DissimilarityMetric metric, int workers = 0);

namespace serial {
/// Single-threaded reference for compute_rdm_values; kept for tests and benchmarks.
Matrix compute_rdm_values(const Matrix& matrix, DissimilarityMetric metric);
}  // namespace serial

/// Upper triangle in row-major order: (0,1), (0,2), ..., (0,n-1), (1,2), ...
std::vector<double> flatten_upper(const Rdm& rdm);
std::vector<double> flatten_upper(const Matrix& square);

/// Inverse of flatten_upper: symmetric matrix with zero diagonal.
Matrix unflatten_upper(std::span<const double> upper, std::size_t n);

/// Element-wise mean of RDMs sharing one condition list.
Rdm average_rdms(std::span<const Rdm> rdms);

}  // namespace net2rdm
