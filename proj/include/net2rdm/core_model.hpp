#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "net2rdm/matrix.hpp"

namespace net2rdm {

struct Layer {
  std::string name;
  Matrix activations;  // [n_stimuli x n_features]
};

/// Unchecked activation data as it arrives from a loader.
struct RawActivationSet {
  std::string network_id;
  std::vector<Layer> layers;
  std::vector<std::string> stimulus_ids;
};

/// Per-layer stimulus x feature matrices for one network. Immutable once
/// constructed through validate_activation_set().
class ActivationSet {
 public:
  const std::string& network_id() const noexcept { return network_id_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const std::vector<std::string>& stimulus_ids() const noexcept { return stimulus_ids_; }
  std::size_t n_stimuli() const noexcept { return stimulus_ids_.size(); }

 private:
  friend ActivationSet validate_activation_set(RawActivationSet raw);
  ActivationSet() = default;

  std::string network_id_;
  std::vector<Layer> layers_;
  std::vector<std::string> stimulus_ids_;
};

/// Checks every ActivationSet invariant; throws Error (MismatchedStimulusCount,
/// NonFiniteValue, DuplicateLayerName) and never repairs data.
ActivationSet validate_activation_set(RawActivationSet raw);

/// Square symmetric dissimilarity matrix with zero diagonal over >= 3 conditions.
class Rdm {
 public:
  /// Validates exact symmetry, zero diagonal, finiteness, n >= 3 and unique ids.
  static Rdm create(std::vector<std::string> condition_ids, Matrix values);

  const std::vector<std::string>& condition_ids() const noexcept { return condition_ids_; }
  const Matrix& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return condition_ids_.size(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_(i, j); }

  bool operator==(const Rdm&) const = default;

 private:
  Rdm(std::vector<std::string> ids, Matrix values)
      : condition_ids_(std::move(ids)), values_(std::move(values)) {}

  std::vector<std::string> condition_ids_;
  Matrix values_;
};

/// Per-subject brain RDMs for one ROI, all over the same condition list.
class SubjectRdmStack {
 public:
  static SubjectRdmStack create(std::string roi_name, std::vector<std::string> subjects,
                                std::vector<Rdm> rdms);

  const std::string& roi_name() const noexcept { return roi_name_; }
  const std::vector<std::string>& subjects() const noexcept { return subjects_; }
  const std::vector<Rdm>& rdms() const noexcept { return rdms_; }
  const std::vector<std::string>& condition_ids() const noexcept {
    return rdms_.front().condition_ids();
  }
  std::size_t n_subjects() const noexcept { return subjects_.size(); }

  bool operator==(const SubjectRdmStack&) const = default;

 private:
  SubjectRdmStack(std::string roi, std::vector<std::string> subjects, std::vector<Rdm> rdms)
      : roi_name_(std::move(roi)), subjects_(std::move(subjects)), rdms_(std::move(rdms)) {}

  std::string roi_name_;
  std::vector<std::string> subjects_;
  std::vector<Rdm> rdms_;
};

/// Per-subject condition x voxel responses plus voxel coordinates in mm.
class VoxelDataset {
 public:
  static VoxelDataset create(std::vector<std::string> subjects, std::vector<Matrix> responses,
                             Matrix coordinates, std::vector<std::string> condition_ids);

  const std::vector<std::string>& subjects() const noexcept { return subjects_; }
  const std::vector<Matrix>& responses() const noexcept { return responses_; }
  const Matrix& coordinates() const noexcept { return coordinates_; }
  const std::vector<std::string>& condition_ids() const noexcept { return condition_ids_; }
  std::size_t n_subjects() const noexcept { return subjects_.size(); }
  std::size_t n_voxels() const noexcept { return coordinates_.rows(); }
  std::size_t n_conditions() const noexcept { return condition_ids_.size(); }

 private:
  VoxelDataset(std::vector<std::string> subjects, std::vector<Matrix> responses, Matrix coords,
               std::vector<std::string> ids)
      : subjects_(std::move(subjects)),
        responses_(std::move(responses)),
        coordinates_(std::move(coords)),
        condition_ids_(std::move(ids)) {}

  std::vector<std::string> subjects_;
  std::vector<Matrix> responses_;
  Matrix coordinates_;
  std::vector<std::string> condition_ids_;
};

struct NoiseCeiling {
  double lower = 0.0;
  double upper = 0.0;
  bool operator==(const NoiseCeiling&) const = default;
};

/// Group-level comparison of one model layer against one ROI.
struct EvaluationResult {
  std::string model_id;
  std::string layer_name;
  std::string roi_name;
  std::vector<std::string> subjects;
  std::vector<double> per_subject_rho;
  std::vector<double> per_subject_score;  // sign(rho) * rho^2
  double mean_score = 0.0;
  std::optional<double> sem;      // absent with a single subject
  std::optional<double> p_value;  // absent with fewer than two subjects
  bool significant = false;
  std::optional<NoiseCeiling> noise_ceiling;  // absent with a single subject

  bool operator==(const EvaluationResult&) const = default;
};

/// sign(x) * x^2
inline double signed_square(double x) noexcept { return x < 0 ? -x * x : x * x; }

/// Restricts and reorders both inputs onto a common condition order.
/// Identical id lists are returned untouched; otherwise the lexicographically
/// sorted intersection is used. Throws InsufficientOverlap below 3 shared ids.
std::pair<Rdm, SubjectRdmStack> align_conditions(const Rdm& model_rdm,
                                                 const SubjectRdmStack& brain);

/// Common condition order for any number of id lists, same rule as above.
std::vector<std::string> common_conditions(const std::vector<std::vector<std::string>>& lists);

/// Restricts an RDM to `ids`, which must all be present.
Rdm restrict_rdm(const Rdm& rdm, const std::vector<std::string>& ids);
SubjectRdmStack restrict_stack(const SubjectRdmStack& stack, const std::vector<std::string>& ids);
VoxelDataset restrict_voxels(const VoxelDataset& data, const std::vector<std::string>& ids);

}  // namespace net2rdm
