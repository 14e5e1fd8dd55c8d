#pragma once

#include <string>
#include <vector>

#include "net2rdm/core_model.hpp"
#include "net2rdm/stats.hpp"

namespace net2rdm {

struct RsaConfig {
  double fdr_q = 0.05;
  PermutationScheme permutation;
  int workers = 0;
};

struct NamedRdm {
  std::string name;
  Rdm rdm;
};

/// All layer RDMs of one network.
struct ModelRdms {
  std::string model_id;
  std::vector<NamedRdm> layers;
};

/// Scores every layer of every model against every subject, then applies
/// Benjamini-Hochberg across all layer p-values of the call. Results are
/// ordered model by model, layer by layer.
std::vector<EvaluationResult> rsa_evaluate(const std::vector<ModelRdms>& models,
                                           const SubjectRdmStack& brain, const RsaConfig& config);

/// Single-model convenience overload.
std::vector<EvaluationResult> rsa_evaluate(const std::string& model_id,
                                           const std::vector<NamedRdm>& layers,
                                           const SubjectRdmStack& brain, const RsaConfig& config);

/// Leave-one-subject-out (lower) and all-subject (upper) noise ceiling on the
/// signed-square scale. Needs at least two subjects.
NoiseCeiling noise_ceiling(const SubjectRdmStack& brain);

/// Two-sided paired sign-flip test on per-subject scores.
double compare_models(const EvaluationResult& a, const EvaluationResult& b,
                      const PermutationScheme& scheme);

/// Per-subject Spearman rho between a model RDM and each subject RDM
/// (conditions must already be aligned).
std::vector<double> subject_correlations(const Rdm& model, const SubjectRdmStack& brain);

}  // namespace net2rdm
