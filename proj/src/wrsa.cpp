#include "net2rdm/wrsa.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>

#include "net2rdm/error.hpp"
#include "net2rdm/parallel.hpp"
#include "net2rdm/rdm.hpp"

namespace net2rdm {

namespace {

double kkt_violation(std::span<const double> w, std::span<const double> g) {
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = w[i] > 0.0 ? std::abs(g[i]) : std::max(0.0, -g[i]);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

NnlsResult nnls_fit(const Matrix& predictors, std::span<const double> target, double tolerance,
                    std::size_t max_iterations) {
  const std::size_t m = predictors.rows();
  const std::size_t k = predictors.cols();
  if (k < 1) fail(ErrorCode::InvalidArgument, "nnls: no predictors");
  if (target.size() != m) fail(ErrorCode::LengthMismatch, "nnls: target length does not match predictor rows");
  if (m < k) fail(ErrorCode::InvalidArgument, "nnls: fewer observations than predictors");
  if (!(tolerance > 0.0)) fail(ErrorCode::InvalidArgument, "nnls: tolerance must be positive");
  for (double v : predictors.data()) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, "nnls: non-finite predictor value");
  }

  // Normal equations: gram = A'A, rhs = A'b.
  Matrix gram(k, k, 0.0);
  std::vector<double> rhs(k, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const auto row = predictors.row(r);
    for (std::size_t a = 0; a < k; ++a) {
      rhs[a] += row[a] * target[r];
      for (std::size_t b = a; b < k; ++b) gram(a, b) += row[a] * row[b];
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < a; ++b) gram(a, b) = gram(b, a);
  }

  auto gradient_at = [&](const std::vector<double>& w, std::size_t i) {
    double g = -rhs[i];
    for (std::size_t j = 0; j < k; ++j) g += gram(i, j) * w[j];
    return g;
  };

  NnlsResult result;
  result.weights.assign(k, 0.0);
  std::vector<double> grad(k);
  auto& w = result.weights;
  for (std::size_t it = 0;; ++it) {
    for (std::size_t i = 0; i < k; ++i) grad[i] = gradient_at(w, i);
    result.kkt_violation = kkt_violation(w, grad);
    result.iterations = it;
    if (result.kkt_violation <= tolerance) {
      result.converged = true;
      break;
    }
    if (it == max_iterations) break;
    for (std::size_t i = 0; i < k; ++i) {
      if (gram(i, i) <= 0.0) continue;  // all-zero predictor keeps weight 0
      const double next = w[i] - gradient_at(w, i) / gram(i, i);
      w[i] = next > 0.0 ? next : 0.0;
    }
  }
  return result;
}

std::vector<std::vector<std::size_t>> condition_folds(std::size_t n_conditions, std::size_t n_folds,
                                                      std::uint64_t seed) {
  if (n_folds < 1) fail(ErrorCode::InvalidArgument, "need at least one fold");
  if (n_folds > n_conditions) {
    fail(ErrorCode::TooManyFolds, std::to_string(n_folds) + " folds requested for " +
                                      std::to_string(n_conditions) + " conditions");
  }
  std::vector<std::size_t> order(n_conditions);
  std::iota(order.begin(), order.end(), 0);
  // Explicit Fisher-Yates keeps the split identical across standard libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n_conditions; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::vector<std::size_t>> folds(n_folds);
  const std::size_t base = n_conditions / n_folds;
  const std::size_t extra = n_conditions % n_folds;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < n_folds; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

PairSplit split_pairs(std::size_t n, const std::vector<std::vector<std::size_t>>& folds, std::size_t fold) {
  std::vector<bool> in_fold(n, false);
  for (std::size_t c : folds.at(fold)) in_fold[c] = true;
  PairSplit split;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      const bool i_in = in_fold[i];
      const bool j_in = in_fold[j];
      if (i_in && j_in) {
        split.test.push_back(k);
      } else if (!i_in && !j_in) {
        split.train.push_back(k);
      }
    }
  }
  return split;
}

namespace {

Matrix gather_rows(const std::vector<std::vector<double>>& columns, const std::vector<std::size_t>& pairs) {
  Matrix out(pairs.size(), columns.size());
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out(r, c) = columns[c][pairs[r]];
  }
  return out;
}

WrsaResult evaluate_one(const std::string& model_id, const std::vector<NamedRdm>& predictors,
                        const SubjectRdmStack& brain, const WrsaConfig& config, std::uint64_t perm_seed) {
  if (predictors.empty()) fail(ErrorCode::EmptyInput, "weighted RSA needs at least one predictor RDM");
  if (config.n_folds < 2) fail(ErrorCode::InvalidArgument, "weighted RSA needs at least 2 folds");

  std::vector<std::vector<std::string>> lists;
  for (const auto& p : predictors) lists.push_back(p.rdm.condition_ids());
  lists.push_back(brain.condition_ids());
  const auto ids = common_conditions(lists);
  const auto stack = restrict_stack(brain, ids);
  const std::size_t n = ids.size();
  if (config.n_folds > n) {
    fail(ErrorCode::TooManyFolds, std::to_string(config.n_folds) + " folds requested for " +
                                      std::to_string(n) + " conditions");
  }
  if (n < 2 * config.n_folds) {
    fail(ErrorCode::InvalidArgument, "weighted RSA needs at least 2 conditions per fold (" + std::to_string(n) +
                                         " conditions, " + std::to_string(config.n_folds) + " folds)");
  }

  std::vector<std::vector<double>> columns;
  for (const auto& p : predictors) columns.push_back(flatten_upper(restrict_rdm(p.rdm, ids)));

  WrsaResult res;
  res.model_id = model_id;
  res.roi_name = brain.roi_name();
  for (const auto& p : predictors) res.predictor_names.push_back(p.name);
  res.subjects = brain.subjects();
  res.folds = condition_folds(n, config.n_folds, config.seed);

  std::vector<PairSplit> splits;
  std::vector<Matrix> train_x;
  std::vector<Matrix> test_x;
  for (std::size_t f = 0; f < res.folds.size(); ++f) {
    splits.push_back(split_pairs(n, res.folds, f));
    train_x.push_back(gather_rows(columns, splits.back().train));
    test_x.push_back(gather_rows(columns, splits.back().test));
  }

  const std::size_t n_subjects = stack.n_subjects();
  const std::size_t n_folds = res.folds.size();
  std::vector<std::vector<double>> observed(n_subjects);
  for (std::size_t s = 0; s < n_subjects; ++s) observed[s] = flatten_upper(stack.rdms()[s]);

  res.per_subject_folds.assign(n_subjects, std::vector<WrsaFold>(n_folds));
  std::vector<std::exception_ptr> errors(n_subjects * n_folds);
  const auto n_tasks = static_cast<std::int64_t>(n_subjects * n_folds);
  const int threads = resolve_workers(config.workers);
  (void)threads;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t t = 0; t < n_tasks; ++t) {
    const std::size_t s = static_cast<std::size_t>(t) / n_folds;
    const std::size_t f = static_cast<std::size_t>(t) % n_folds;
    try {
      WrsaFold& out = res.per_subject_folds[s][f];
      out.fold = f;
      if (res.folds[f].size() < 3) {
        out.warning = "TestFoldTooSmall: fold " + std::to_string(f) + " has fewer than 3 conditions";
        continue;
      }
      const auto& split = splits[f];
      std::vector<double> target(split.train.size());
      for (std::size_t r = 0; r < split.train.size(); ++r) target[r] = observed[s][split.train[r]];
      const auto fit = nnls_fit(train_x[f], target, config.nnls_tolerance, config.nnls_max_iterations);
      out.weights = fit.weights;
      out.converged = fit.converged;
      if (!fit.converged) {
        out.warning = "MaxIterationsExceeded: fold " + std::to_string(f) + " stopped at KKT violation " +
                      std::to_string(fit.kkt_violation);
      }
      std::vector<double> predicted(split.test.size(), 0.0);
      std::vector<double> held_out(split.test.size());
      for (std::size_t r = 0; r < split.test.size(); ++r) {
        for (std::size_t c = 0; c < fit.weights.size(); ++c) predicted[r] += test_x[f](r, c) * fit.weights[c];
        held_out[r] = observed[s][split.test[r]];
      }
      try {
        out.r = pearson(predicted, held_out);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ConstantInput) throw;
        out.warning = "fold " + std::to_string(f) + " skipped: constant prediction or observation";
      }
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t s = 0; s < n_subjects; ++s) {
    std::vector<double> rs;
    for (const auto& fold : res.per_subject_folds[s]) {
      if (fold.r) rs.push_back(*fold.r);
      if (!fold.warning.empty()) res.warnings.push_back("subject " + res.subjects[s] + ": " + fold.warning);
    }
    if (rs.empty()) {
      fail(ErrorCode::TestFoldTooSmall, "every fold was skipped for subject '" + res.subjects[s] + "'");
    }
    res.per_subject_mean_r.push_back(mean(rs));
    res.per_subject_score.push_back(signed_square(res.per_subject_mean_r.back()));
  }
  res.mean_score = mean(res.per_subject_score);
  if (n_subjects >= 2) {
    res.sem = sem(res.per_subject_score);
    PermutationScheme scheme = config.permutation;
    scheme.seed = perm_seed;
    res.p_value = sign_flip_test(res.per_subject_score, Alternative::greater, scheme);
    res.noise_ceiling = noise_ceiling(stack);
  }
  return res;
}

}  // namespace

std::vector<WrsaResult> wrsa_evaluate(const std::vector<ModelRdms>& models, const SubjectRdmStack& brain,
                                      const WrsaConfig& config) {
  if (!(config.fdr_q > 0.0 && config.fdr_q < 1.0)) {
    fail(ErrorCode::InvalidArgument, "FDR level q must lie in (0, 1)");
  }
  std::vector<WrsaResult> results;
  for (std::size_t m = 0; m < models.size(); ++m) {
    results.push_back(evaluate_one(models[m].model_id, models[m].layers, brain, config,
                                   derive_seed(config.permutation.seed, m)));
  }
  if (brain.n_subjects() >= 2 && !results.empty()) {
    std::vector<double> p;
    for (const auto& r : results) p.push_back(*r.p_value);
    const auto rejected = fdr_bh(p, config.fdr_q);
    for (std::size_t i = 0; i < results.size(); ++i) results[i].significant = rejected[i];
  }
  return results;
}

WrsaResult wrsa_evaluate(const std::string& model_id, const std::vector<NamedRdm>& predictors,
                         const SubjectRdmStack& brain, const WrsaConfig& config) {
  return wrsa_evaluate(std::vector<ModelRdms>{{model_id, predictors}}, brain, config).front();
}

}  // namespace net2rdm
