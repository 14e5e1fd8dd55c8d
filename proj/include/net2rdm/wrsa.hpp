#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "net2rdm/core_model.hpp"
#include "net2rdm/rsa.hpp"
#include "net2rdm/stats.hpp"

namespace net2rdm {

struct WrsaConfig {
  std::size_t n_folds = 5;
  std::uint64_t seed = 0;
  double nnls_tolerance = 1e-10;
  std::size_t nnls_max_iterations = 10'000;
  double fdr_q = 0.05;
  PermutationScheme permutation;
  int workers = 0;
};

struct NnlsResult {
  std::vector<double> weights;
  std::size_t iterations = 0;
  double kkt_violation = 0.0;
  bool converged = false;  // false: MaxIterationsExceeded, weights hold the last iterate
};

/// Non-negative least squares by projected coordinate descent on the normal
/// equations. `predictors` is [m x k], one predictor per column.
NnlsResult nnls_fit(const Matrix& predictors, std::span<const double> target, double tolerance = 1e-10,
                    std::size_t max_iterations = 10'000);

/// Seeded shuffle of 0..n-1 cut into `n_folds` balanced folds; each fold is
/// returned sorted.
std::vector<std::vector<std::size_t>> condition_folds(std::size_t n_conditions, std::size_t n_folds,
                                                      std::uint64_t seed);

/// Upper-triangle pair indices for one fold: test pairs have both conditions
/// inside the fold, training pairs both outside; straddling pairs are dropped.
struct PairSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

PairSplit split_pairs(std::size_t n_conditions, const std::vector<std::vector<std::size_t>>& folds, std::size_t fold);

struct WrsaFold {
  std::size_t fold = 0;
  std::vector<double> weights;
  std::optional<double> r;  // absent when the fold was skipped
  bool converged = true;
  std::string warning;

  bool operator==(const WrsaFold&) const = default;
};

struct WrsaResult {
  std::string model_id;
  std::string roi_name;
  std::vector<std::string> predictor_names;
  std::vector<std::string> subjects;
  std::vector<std::vector<std::size_t>> folds;  // condition indices per fold
  std::vector<std::vector<WrsaFold>> per_subject_folds;
  std::vector<double> per_subject_mean_r;
  std::vector<double> per_subject_score;  // signed square of the mean fold r
  double mean_score = 0.0;
  std::optional<double> sem;
  std::optional<double> p_value;
  bool significant = false;
  std::optional<NoiseCeiling> noise_ceiling;
  std::vector<std::string> warnings;

  bool operator==(const WrsaResult&) const = default;
};

/// Cross-validated weighted RSA of one model's predictor RDMs (usually its
/// layers) against every subject, folds over conditions.
WrsaResult wrsa_evaluate(const std::string& model_id, const std::vector<NamedRdm>& predictors,
                         const SubjectRdmStack& brain, const WrsaConfig& config);

/// Several models at once; significance flags are FDR-corrected across them.
std::vector<WrsaResult> wrsa_evaluate(const std::vector<ModelRdms>& models, const SubjectRdmStack& brain,
                                      const WrsaConfig& config);

}  // namespace net2rdm
