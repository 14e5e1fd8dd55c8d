#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "net2rdm/core_model.hpp"
#include "net2rdm/rdm.hpp"

namespace net2rdm {

struct SearchlightConfig {
  double radius_mm = 10.0;
  std::size_t min_voxels = 5;
  DissimilarityMetric metric = DissimilarityMetric::correlation;
  int workers = 0;
};

/// Marker stored for skipped centers.
inline constexpr double kInvalidScore = std::numeric_limits<double>::quiet_NaN();

struct SearchlightMap {
  Matrix per_subject_scores;                 // [n_subjects x n_voxels], NaN = invalid center
  std::vector<double> mean_scores;           // [n_voxels], NaN = invalid center
  std::vector<std::uint32_t> n_voxels_per_sphere;
  std::vector<std::string> subjects;

  std::size_t n_valid() const noexcept;
  bool valid(std::size_t center) const noexcept { return mean_scores[center] == mean_scores[center]; }
};

using Sphere = std::vector<std::uint32_t>;

/// Voxels within `radius_mm` of each voxel (inclusive), sorted by index, using
/// a uniform grid with cell size equal to the radius.
std::vector<Sphere> build_spheres(const Matrix& coordinates, double radius_mm, int workers = 0);

namespace serial {
/// O(n^2) all-pairs reference for build_spheres.
std::vector<Sphere> build_spheres(const Matrix& coordinates, double radius_mm);
}  // namespace serial

/// Local RSA at every voxel. Centers with fewer than min_voxels neighbours, or
/// whose local pattern violates the metric preconditions for any subject,
/// are marked invalid for all subjects. Throws AllCentersInvalid when nothing
/// survives. Output is independent of config.workers.
SearchlightMap searchlight_rsa(const VoxelDataset& data, const Rdm& model_rdm, const SearchlightConfig& config);

namespace serial {
SearchlightMap searchlight_rsa(const VoxelDataset& data, const Rdm& model_rdm, const SearchlightConfig& config);
}  // namespace serial

}  // namespace net2rdm
