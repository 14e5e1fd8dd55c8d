#include "net2rdm/rsa.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <map>

#include "net2rdm/error.hpp"
#include "net2rdm/parallel.hpp"
#include "net2rdm/rdm.hpp"

namespace net2rdm {

std::vector<double> subject_correlations(const Rdm& model, const SubjectRdmStack& brain) {
  const auto model_upper = flatten_upper(model);
  std::vector<double> rho;
  rho.reserve(brain.n_subjects());
  for (const auto& subject : brain.rdms()) rho.push_back(spearman(model_upper, flatten_upper(subject)));
  return rho;
}

NoiseCeiling noise_ceiling(const SubjectRdmStack& brain) {
  const std::size_t n = brain.n_subjects();
  if (n < 2) fail(ErrorCode::TooFewSubjects, "noise ceiling needs at least 2 subjects");

  const auto& rdms = brain.rdms();
  const auto all_mean = flatten_upper(average_rdms(rdms));
  double lower_sum = 0.0;
  double upper_sum = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<Rdm> others;
    others.reserve(n - 1);
    for (std::size_t t = 0; t < n; ++t) {
      if (t != s) others.push_back(rdms[t]);
    }
    const auto subject = flatten_upper(rdms[s]);
    lower_sum += spearman(subject, flatten_upper(average_rdms(others)));
    upper_sum += spearman(subject, all_mean);
  }
  NoiseCeiling nc;
  nc.lower = signed_square(lower_sum / static_cast<double>(n));
  nc.upper = signed_square(upper_sum / static_cast<double>(n));
  nc.lower = std::min(nc.lower, nc.upper);
  return nc;
}

namespace {

struct LayerTask {
  const ModelRdms* model;
  const NamedRdm* layer;
  Rdm aligned;
  std::size_t stack_index;
};

}  // namespace

std::vector<EvaluationResult> rsa_evaluate(const std::vector<ModelRdms>& models,
                                           const SubjectRdmStack& brain, const RsaConfig& config) {
  if (!(config.fdr_q > 0.0 && config.fdr_q < 1.0)) {
    fail(ErrorCode::InvalidArgument, "FDR level q must lie in (0, 1)");
  }

  // Alignment is cheap and may throw, so it runs up front and serially.
  std::map<std::vector<std::string>, std::size_t> stack_of;
  std::vector<SubjectRdmStack> stacks;
  std::vector<LayerTask> tasks;
  for (const auto& model : models) {
    for (const auto& layer : model.layers) {
      const auto ids = common_conditions({layer.rdm.condition_ids(), brain.condition_ids()});
      auto [it, inserted] = stack_of.try_emplace(ids, stacks.size());
      if (inserted) stacks.push_back(restrict_stack(brain, ids));
      tasks.push_back({&model, &layer, restrict_rdm(layer.rdm, ids), it->second});
    }
  }
  if (tasks.empty()) fail(ErrorCode::EmptyInput, "no model layers to evaluate");

  const std::size_t n_subjects = brain.n_subjects();
  std::vector<std::optional<NoiseCeiling>> ceilings(stacks.size());
  if (n_subjects >= 2) {
    for (std::size_t k = 0; k < stacks.size(); ++k) ceilings[k] = noise_ceiling(stacks[k]);
  }

  std::vector<EvaluationResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const auto n_tasks = static_cast<std::int64_t>(tasks.size());
  const int threads = resolve_workers(config.workers);
  (void)threads;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t t = 0; t < n_tasks; ++t) {
    try {
      const auto& task = tasks[t];
      EvaluationResult r;
      r.model_id = task.model->model_id;
      r.layer_name = task.layer->name;
      r.roi_name = brain.roi_name();
      r.subjects = brain.subjects();
      r.per_subject_rho = subject_correlations(task.aligned, stacks[task.stack_index]);
      r.per_subject_score.reserve(n_subjects);
      for (double rho : r.per_subject_rho) r.per_subject_score.push_back(signed_square(rho));
      r.mean_score = mean(r.per_subject_score);
      if (n_subjects >= 2) {
        r.sem = sem(r.per_subject_score);
        PermutationScheme scheme = config.permutation;
        scheme.seed = derive_seed(config.permutation.seed, static_cast<std::uint64_t>(t));
        r.p_value = sign_flip_test(r.per_subject_score, Alternative::greater, scheme);
      }
      r.noise_ceiling = ceilings[task.stack_index];
      results[t] = std::move(r);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  if (n_subjects >= 2) {
    std::vector<double> p;
    p.reserve(results.size());
    for (const auto& r : results) p.push_back(*r.p_value);
    const auto rejected = fdr_bh(p, config.fdr_q);
    for (std::size_t i = 0; i < results.size(); ++i) results[i].significant = rejected[i];
  }
  return results;
}

std::vector<EvaluationResult> rsa_evaluate(const std::string& model_id, const std::vector<NamedRdm>& layers,
                                           const SubjectRdmStack& brain, const RsaConfig& config) {
  return rsa_evaluate(std::vector<ModelRdms>{{model_id, layers}}, brain, config);
}

double compare_models(const EvaluationResult& a, const EvaluationResult& b, const PermutationScheme& scheme) {
  if (a.roi_name != b.roi_name) {
    fail(ErrorCode::SubjectMismatch, "cannot compare results from ROIs '" + a.roi_name + "' and '" +
                                         b.roi_name + "'");
  }
  if (a.subjects != b.subjects || a.per_subject_score.size() != b.per_subject_score.size()) {
    fail(ErrorCode::SubjectMismatch, "results cover different subjects or subject orders");
  }
  return paired_difference_test(a.per_subject_score, b.per_subject_score, scheme);
}

}  // namespace net2rdm
