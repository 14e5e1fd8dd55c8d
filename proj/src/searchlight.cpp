#include "net2rdm/searchlight.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <span>
#include <unordered_map>

#include "net2rdm/error.hpp"
#include "net2rdm/parallel.hpp"
#include "net2rdm/stats.hpp"

namespace net2rdm {

std::size_t SearchlightMap::n_valid() const noexcept {
  std::size_t count = 0;
  for (std::size_t v = 0; v < mean_scores.size(); ++v) count += valid(v) ? 1 : 0;
  return count;
}

namespace {

using Cell = std::array<std::int64_t, 3>;

struct CellHash {
  std::size_t operator()(const Cell& c) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t v : c) {
      h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

// Voxels bucketed by grid cell. Occupied cells normally fill their bounding
// box densely, so a flat CSR table is used; very sparse clouds fall back to a
// hash map to keep memory proportional to the voxel count.
class CellIndex {
 public:
  explicit CellIndex(const std::vector<Cell>& cell_of) {
    lo_ = hi_ = cell_of.empty() ? Cell{0, 0, 0} : cell_of.front();
    for (const auto& c : cell_of) {
      for (int a = 0; a < 3; ++a) {
        lo_[a] = std::min(lo_[a], c[a]);
        hi_[a] = std::max(hi_[a], c[a]);
      }
    }
    double cells = 1.0;
    for (int a = 0; a < 3; ++a) {
      extent_[a] = hi_[a] - lo_[a] + 1;
      cells *= static_cast<double>(extent_[a]);
    }
    dense_ = cells <= 8.0 * static_cast<double>(cell_of.size()) + 4096.0;
    if (!dense_) {
      for (std::size_t v = 0; v < cell_of.size(); ++v) sparse_[cell_of[v]].push_back(static_cast<std::uint32_t>(v));
      return;
    }
    // counting sort keeps voxel order inside each cell
    offsets_.assign(static_cast<std::size_t>(cells) + 1, 0);
    for (const auto& c : cell_of) ++offsets_[flat(c) + 1];
    for (std::size_t k = 1; k < offsets_.size(); ++k) offsets_[k] += offsets_[k - 1];
    members_.resize(cell_of.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t v = 0; v < cell_of.size(); ++v) members_[fill[flat(cell_of[v])]++] = static_cast<std::uint32_t>(v);
  }

  std::span<const std::uint32_t> at(const Cell& c) const {
    if (!dense_) {
      const auto it = sparse_.find(c);
      return it == sparse_.end() ? std::span<const std::uint32_t>{} : std::span<const std::uint32_t>(it->second);
    }
    for (int a = 0; a < 3; ++a) {
      if (c[a] < lo_[a] || c[a] > hi_[a]) return {};
    }
    const std::size_t k = flat(c);
    return {members_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
  }

 private:
  std::size_t flat(const Cell& c) const noexcept {
    return static_cast<std::size_t>((c[2] - lo_[2]) * extent_[1] * extent_[0] + (c[1] - lo_[1]) * extent_[0] +
                                    (c[0] - lo_[0]));
  }

  Cell lo_{}, hi_{}, extent_{};
  bool dense_ = true;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> members_;
  std::unordered_map<Cell, std::vector<std::uint32_t>, CellHash> sparse_;
};

double distance(const Matrix& xyz, std::size_t a, std::size_t b) {
  const double dx = xyz(a, 0) - xyz(b, 0);
  const double dy = xyz(a, 1) - xyz(b, 1);
  const double dz = xyz(a, 2) - xyz(b, 2);
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void check_geometry(const Matrix& coordinates, double radius_mm) {
  if (coordinates.cols() != 3) fail(ErrorCode::ShapeMismatch, "coordinates must have 3 columns");
  if (!(radius_mm > 0.0) || !std::isfinite(radius_mm)) {
    fail(ErrorCode::InvalidArgument, "searchlight radius must be a positive finite number");
  }
  if (coordinates.rows() > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::InvalidArgument, "too many voxels");
  }
}

void check_config(const SearchlightConfig& config) {
  if (config.min_voxels < 2) fail(ErrorCode::InvalidArgument, "min_voxels must be at least 2");
}

// Local analysis at one center; writes one score per subject or leaves the
// column untouched (NaN) when the center is invalid.
// `voxel_major[s]` is subject s's responses transposed to [voxel x condition],
// so gathering a sphere touches only its own voxels.
void score_center(const std::vector<Matrix>& voxel_major, const Sphere& sphere, std::span<const double> model_ranks,
                  const SearchlightConfig& config, std::size_t center, Matrix& scores) {
  if (sphere.size() < config.min_voxels) return;
  const std::size_t n_subjects = voxel_major.size();
  const std::size_t n_cond = voxel_major.front().cols();
  std::vector<double> local(n_subjects);
  Matrix pattern(n_cond, sphere.size());
  for (std::size_t s = 0; s < n_subjects; ++s) {
    for (std::size_t k = 0; k < sphere.size(); ++k) {
      const auto voxel = voxel_major[s].row(sphere[k]);
      for (std::size_t c = 0; c < n_cond; ++c) pattern(c, k) = voxel[c];
    }
    try {
      const auto upper = flatten_upper(serial::compute_rdm_values(pattern, config.metric));
      if (std::all_of(upper.begin(), upper.end(), [&](double v) { return v == upper[0]; })) return;
      local[s] = signed_square(pearson(average_ranks(upper), model_ranks));
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::ConstantRow:
        case ErrorCode::ZeroNormRow:
        case ErrorCode::InvalidArgument:
        case ErrorCode::ConstantInput:
          return;
        default:
          throw;
      }
    }
  }
  for (std::size_t s = 0; s < n_subjects; ++s) scores(s, center) = local[s];
}

struct Prepared {
  VoxelDataset data;
  std::vector<double> model_ranks;
  std::vector<Matrix> voxel_major;
};

std::vector<Matrix> transpose_responses(const VoxelDataset& data) {
  std::vector<Matrix> out;
  for (const auto& r : data.responses()) {
    Matrix t(r.cols(), r.rows());
    for (std::size_t c = 0; c < r.rows(); ++c)
      for (std::size_t v = 0; v < r.cols(); ++v) t(v, c) = r(c, v);
    out.push_back(std::move(t));
  }
  return out;
}

Prepared prepare(const VoxelDataset& data, const Rdm& model_rdm, const SearchlightConfig& config) {
  check_config(config);
  const auto ids = common_conditions({model_rdm.condition_ids(), data.condition_ids()});
  const auto model_upper = flatten_upper(restrict_rdm(model_rdm, ids));
  if (std::all_of(model_upper.begin(), model_upper.end(), [&](double v) { return v == model_upper[0]; })) {
    fail(ErrorCode::AllTied, "model RDM has no variation across condition pairs");
  }
  auto restricted = restrict_voxels(data, ids);
  auto voxel_major = transpose_responses(restricted);
  return {std::move(restricted), average_ranks(model_upper), std::move(voxel_major)};
}

SearchlightMap finish(Matrix scores, const std::vector<Sphere>& spheres, const VoxelDataset& data) {
  SearchlightMap map;
  const std::size_t n_vox = data.n_voxels();
  map.subjects = data.subjects();
  map.mean_scores.assign(n_vox, kInvalidScore);
  map.n_voxels_per_sphere.resize(n_vox);
  for (std::size_t v = 0; v < n_vox; ++v) {
    map.n_voxels_per_sphere[v] = static_cast<std::uint32_t>(spheres[v].size());
    if (std::isnan(scores(0, v))) continue;
    double sum = 0.0;
    for (std::size_t s = 0; s < scores.rows(); ++s) sum += scores(s, v);
    map.mean_scores[v] = sum / static_cast<double>(scores.rows());
  }
  map.per_subject_scores = std::move(scores);
  if (map.n_valid() == 0) {
    fail(ErrorCode::AllCentersInvalid, "no searchlight center passed the sphere-size and metric checks");
  }
  return map;
}

}  // namespace

std::vector<Sphere> build_spheres(const Matrix& coordinates, double radius_mm, int workers) {
  check_geometry(coordinates, radius_mm);
  const std::size_t n = coordinates.rows();
  // Slightly oversized cells so rounding in the division can never push a
  // neighbour at exactly radius_mm two cells away.
  const double cell_size = radius_mm * (1.0 + 1e-9);
  std::vector<Cell> cell_of(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (int a = 0; a < 3; ++a) cell_of[v][a] = static_cast<std::int64_t>(std::floor(coordinates(v, a) / cell_size));
  }
  const CellIndex grid(cell_of);

  std::vector<Sphere> spheres(n);
  const auto n_centers = static_cast<std::int64_t>(n);
  const int threads = resolve_workers(workers);
  (void)threads;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t center = 0; center < n_centers; ++center) {
    const Cell& home = cell_of[center];
    Sphere& members = spheres[center];
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          for (std::uint32_t v : grid.at({home[0] + dx, home[1] + dy, home[2] + dz})) {
            if (distance(coordinates, static_cast<std::size_t>(center), v) <= radius_mm) members.push_back(v);
          }
        }
      }
    }
    std::sort(members.begin(), members.end());
  }
  return spheres;
}

namespace serial {

std::vector<Sphere> build_spheres(const Matrix& coordinates, double radius_mm) {
  check_geometry(coordinates, radius_mm);
  const std::size_t n = coordinates.rows();
  std::vector<Sphere> spheres(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t v = 0; v < n; ++v) {
      if (distance(coordinates, c, v) <= radius_mm) spheres[c].push_back(static_cast<std::uint32_t>(v));
    }
  }
  return spheres;
}

SearchlightMap searchlight_rsa(const VoxelDataset& data, const Rdm& model_rdm, const SearchlightConfig& config) {
  const Prepared p = prepare(data, model_rdm, config);
  const auto spheres = serial::build_spheres(p.data.coordinates(), config.radius_mm);
  Matrix scores(p.data.n_subjects(), p.data.n_voxels(), kInvalidScore);
  for (std::size_t c = 0; c < spheres.size(); ++c) score_center(p.voxel_major, spheres[c], p.model_ranks, config, c, scores);
  return finish(std::move(scores), spheres, p.data);
}

}  // namespace serial

SearchlightMap searchlight_rsa(const VoxelDataset& data, const Rdm& model_rdm, const SearchlightConfig& config) {
  const Prepared p = prepare(data, model_rdm, config);
  const auto spheres = build_spheres(p.data.coordinates(), config.radius_mm, config.workers);
  Matrix scores(p.data.n_subjects(), p.data.n_voxels(), kInvalidScore);

  std::vector<std::exception_ptr> errors(spheres.size());
  const auto n_centers = static_cast<std::int64_t>(spheres.size());
  const int threads = resolve_workers(config.workers);
  (void)threads;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t c = 0; c < n_centers; ++c) {
    try {
      score_center(p.voxel_major, spheres[c], p.model_ranks, config, static_cast<std::size_t>(c), scores);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return finish(std::move(scores), spheres, p.data);
}

}  // namespace net2rdm
