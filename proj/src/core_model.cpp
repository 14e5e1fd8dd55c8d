#include "net2rdm/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "net2rdm/error.hpp"

namespace net2rdm {

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) fail(ErrorCode::DuplicateId, std::string("duplicate ") + what + " '" + id + "'");
  }
}

void require_finite(const Matrix& m, const std::string& what) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(r, c))) {
        fail(ErrorCode::NonFiniteValue, "non-finite value in " + what + " at row " + std::to_string(r) +
                                            ", col " + std::to_string(c));
      }
    }
  }
}

std::vector<std::size_t> index_map(const std::vector<std::string>& from,
                                   const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < from.size(); ++i) pos.emplace(from[i], i);
  std::vector<std::size_t> idx;
  idx.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = pos.find(id);
    if (it == pos.end()) fail(ErrorCode::ConditionMismatch, "condition '" + id + "' not present");
    idx.push_back(it->second);
  }
  return idx;
}

}  // namespace

ActivationSet validate_activation_set(RawActivationSet raw) {
  const std::size_t n = raw.stimulus_ids.size();
  std::set<std::string> names;
  for (const auto& layer : raw.layers) {
    if (!names.insert(layer.name).second) {
      fail(ErrorCode::DuplicateLayerName, "duplicate layer name '" + layer.name + "'");
    }
    if (layer.activations.rows() != n) {
      fail(ErrorCode::MismatchedStimulusCount,
           "layer '" + layer.name + "' has " + std::to_string(layer.activations.rows()) +
               " rows but there are " + std::to_string(n) + " stimulus ids");
    }
    if (layer.activations.cols() < 1) {
      fail(ErrorCode::InvalidArgument, "layer '" + layer.name + "' has no features");
    }
    require_finite(layer.activations, "layer '" + layer.name + "'");
  }
  require_unique(raw.stimulus_ids, "stimulus id");

  ActivationSet set;
  set.network_id_ = std::move(raw.network_id);
  set.layers_ = std::move(raw.layers);
  set.stimulus_ids_ = std::move(raw.stimulus_ids);
  return set;
}

Rdm Rdm::create(std::vector<std::string> condition_ids, Matrix values) {
  const std::size_t n = condition_ids.size();
  if (n < 3) fail(ErrorCode::TooFewConditions, "an RDM needs at least 3 conditions, got " + std::to_string(n));
  if (values.rows() != n || values.cols() != n) {
    fail(ErrorCode::ShapeMismatch, "RDM values must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  require_unique(condition_ids, "condition id");
  require_finite(values, "RDM");
  for (std::size_t i = 0; i < n; ++i) {
    if (values(i, i) != 0.0) {
      fail(ErrorCode::InvalidRdm, "RDM diagonal entry " + std::to_string(i) + " is not zero");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (values(i, j) != values(j, i)) {
        fail(ErrorCode::InvalidRdm, "RDM is not symmetric at (" + std::to_string(i) + ", " +
                                        std::to_string(j) + ")");
      }
    }
  }
  return Rdm(std::move(condition_ids), std::move(values));
}

SubjectRdmStack SubjectRdmStack::create(std::string roi_name, std::vector<std::string> subjects,
                                        std::vector<Rdm> rdms) {
  if (subjects.empty()) fail(ErrorCode::TooFewSubjects, "a subject RDM stack needs at least one subject");
  if (subjects.size() != rdms.size()) {
    fail(ErrorCode::LengthMismatch, "subject count does not match RDM count");
  }
  require_unique(subjects, "subject id");
  for (std::size_t s = 1; s < rdms.size(); ++s) {
    if (rdms[s].condition_ids() != rdms[0].condition_ids()) {
      fail(ErrorCode::ConditionMismatch, "subject '" + subjects[s] + "' has a different condition list");
    }
  }
  return SubjectRdmStack(std::move(roi_name), std::move(subjects), std::move(rdms));
}

VoxelDataset VoxelDataset::create(std::vector<std::string> subjects, std::vector<Matrix> responses,
                                  Matrix coordinates, std::vector<std::string> condition_ids) {
  if (subjects.empty()) fail(ErrorCode::TooFewSubjects, "a voxel dataset needs at least one subject");
  if (subjects.size() != responses.size()) {
    fail(ErrorCode::LengthMismatch, "subject count does not match response count");
  }
  require_unique(subjects, "subject id");
  require_unique(condition_ids, "condition id");
  if (coordinates.cols() != 3) fail(ErrorCode::ShapeMismatch, "coordinates must have 3 columns");
  require_finite(coordinates, "coordinates");
  for (std::size_t s = 0; s < responses.size(); ++s) {
    const auto& r = responses[s];
    if (r.rows() != condition_ids.size()) {
      fail(ErrorCode::ShapeMismatch, "subject '" + subjects[s] + "' has " + std::to_string(r.rows()) +
                                         " condition rows, expected " + std::to_string(condition_ids.size()));
    }
    if (r.cols() != coordinates.rows()) {
      fail(ErrorCode::ShapeMismatch, "subject '" + subjects[s] + "' has " + std::to_string(r.cols()) +
                                         " voxels but there are " + std::to_string(coordinates.rows()) +
                                         " coordinate rows");
    }
    require_finite(r, "subject '" + subjects[s] + "' responses");
  }
  std::vector<std::size_t> order(coordinates.rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto row_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(coordinates.row(a).begin(), coordinates.row(a).end(),
                                        coordinates.row(b).begin(), coordinates.row(b).end());
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!row_less(order[i - 1], order[i])) {
      fail(ErrorCode::DuplicateId, "duplicate voxel coordinate at rows " + std::to_string(order[i - 1]) +
                                       " and " + std::to_string(order[i]));
    }
  }
  return VoxelDataset(std::move(subjects), std::move(responses), std::move(coordinates),
                      std::move(condition_ids));
}

std::vector<std::string> common_conditions(const std::vector<std::vector<std::string>>& lists) {
  if (lists.empty()) fail(ErrorCode::EmptyInput, "no condition lists to align");
  const bool all_same = std::all_of(lists.begin(), lists.end(), [&](const auto& l) { return l == lists[0]; });
  std::vector<std::string> ids;
  if (all_same) {
    ids = lists[0];
  } else {
    std::vector<std::string> acc = lists[0];
    std::sort(acc.begin(), acc.end());
    for (std::size_t k = 1; k < lists.size(); ++k) {
      std::vector<std::string> other = lists[k];
      std::sort(other.begin(), other.end());
      std::vector<std::string> next;
      std::set_intersection(acc.begin(), acc.end(), other.begin(), other.end(), std::back_inserter(next));
      acc = std::move(next);
    }
    ids = std::move(acc);
  }
  if (ids.size() < 3) {
    fail(ErrorCode::InsufficientOverlap,
         "only " + std::to_string(ids.size()) + " shared conditions; at least 3 are required");
  }
  return ids;
}

Rdm restrict_rdm(const Rdm& rdm, const std::vector<std::string>& ids) {
  if (ids == rdm.condition_ids()) return rdm;
  const auto idx = index_map(rdm.condition_ids(), ids);
  Matrix values(ids.size(), ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = 0; j < ids.size(); ++j) values(i, j) = rdm(idx[i], idx[j]);
  }
  return Rdm::create(ids, std::move(values));
}

SubjectRdmStack restrict_stack(const SubjectRdmStack& stack, const std::vector<std::string>& ids) {
  if (ids == stack.condition_ids()) return stack;
  std::vector<Rdm> rdms;
  rdms.reserve(stack.rdms().size());
  for (const auto& r : stack.rdms()) rdms.push_back(restrict_rdm(r, ids));
  return SubjectRdmStack::create(stack.roi_name(), stack.subjects(), std::move(rdms));
}

VoxelDataset restrict_voxels(const VoxelDataset& data, const std::vector<std::string>& ids) {
  if (ids == data.condition_ids()) return data;
  const auto idx = index_map(data.condition_ids(), ids);
  std::vector<Matrix> responses;
  responses.reserve(data.n_subjects());
  for (const auto& r : data.responses()) {
    Matrix m(ids.size(), r.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      std::copy(r.row(idx[i]).begin(), r.row(idx[i]).end(), m.row(i).begin());
    }
    responses.push_back(std::move(m));
  }
  return VoxelDataset::create(data.subjects(), std::move(responses), data.coordinates(), ids);
}

std::pair<Rdm, SubjectRdmStack> align_conditions(const Rdm& model_rdm, const SubjectRdmStack& brain) {
  const auto ids = common_conditions({model_rdm.condition_ids(), brain.condition_ids()});
  return {restrict_rdm(model_rdm, ids), restrict_stack(brain, ids)};
}

}  // namespace net2rdm
