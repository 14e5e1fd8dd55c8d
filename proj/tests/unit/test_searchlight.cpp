#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <random>

#include "net2rdm/error.hpp"
#include "net2rdm/searchlight.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace net2rdm;

namespace {

Matrix grid(std::size_t nx, std::size_t ny, std::size_t nz, double spacing = 1.0) {
  Matrix m(nx * ny * nz, 3);
  std::size_t v = 0;
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x, ++v) {
        m(v, 0) = spacing * static_cast<double>(x);
        m(v, 1) = spacing * static_cast<double>(y);
        m(v, 2) = spacing * static_cast<double>(z);
      }
  return m;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("sphere sizes on a unit grid") {
  const auto g = grid(3, 3, 3);
  const std::size_t center = 13;  // (1,1,1)
  CHECK(build_spheres(g, 1.0)[center].size() == 7);
  CHECK(build_spheres(g, 1.5)[center].size() == 19);
}

TEST_CASE("grid hash matches the brute-force oracle") {
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  Matrix cloud(50, 3);
  for (auto& v : cloud.data()) v = u(rng);
  for (double r : {0.5, 2.0, 3.3, 7.0, 20.0}) {
    const auto want = oracle::spheres(cloud, r);
    const auto got = build_spheres(cloud, r);
    CHECK(got == want);
    CHECK(serial::build_spheres(cloud, r) == want);
    CHECK(build_spheres(cloud, r, 8) == want);
  }
}

TEST_CASE("widely scattered clouds match the oracle too") {
  // a few voxels spread over a large box leave almost every grid cell empty
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-500.0, 500.0);
  Matrix cloud(60, 3);
  for (auto& v : cloud.data()) v = u(rng);
  for (std::size_t k = 0; k < 20; ++k) {
    for (std::size_t a = 0; a < 3; ++a) cloud(40 + k, a) = cloud(k, a) + 0.4 * static_cast<double>(a + 1);
  }
  for (double r : {1.0, 1.5, 60.0}) CHECK(build_spheres(cloud, r) == oracle::spheres(cloud, r));
}

TEST_CASE("sphere membership is symmetric") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Matrix cloud(200, 3);
  for (auto& v : cloud.data()) v = u(rng);
  const auto spheres = build_spheres(cloud, 2.5);
  for (std::size_t c = 0; c < spheres.size(); ++c) {
    for (auto v : spheres[c]) CHECK(std::binary_search(spheres[v].begin(), spheres[v].end(), c));
  }
}

TEST_CASE("planted cube wins and the map is worker independent") {
  const auto vol = synth::planted_volume(5);
  SearchlightConfig config;
  config.radius_mm = 1.5;
  config.workers = 1;
  const auto one = searchlight_rsa(vol.data, vol.model, config);
  config.workers = 8;
  const auto eight = searchlight_rsa(vol.data, vol.model, config);
  CHECK(same_bits(one.mean_scores, eight.mean_scores));
  CHECK(same_bits(one.per_subject_scores.data(), eight.per_subject_scores.data()));
  CHECK(same_bits(serial::searchlight_rsa(vol.data, vol.model, config).mean_scores, one.mean_scores));

  std::size_t best = 0;
  for (std::size_t v = 0; v < one.mean_scores.size(); ++v) {
    if (one.valid(v) && (!one.valid(best) || one.mean_scores[v] > one.mean_scores[best])) best = v;
  }
  CHECK(vol.planted[best]);

  for (std::size_t v = 0; v < one.mean_scores.size(); ++v) {
    if (!one.valid(v)) continue;
    CHECK(one.mean_scores[v] >= -1.0);
    CHECK(one.mean_scores[v] <= 1.0);
  }
}

TEST_CASE("permuting subjects permutes rows and keeps the mean map") {
  const auto vol = synth::planted_volume(6, 8, 8, 3);
  const auto& d = vol.data;
  const auto swapped = VoxelDataset::create({d.subjects()[2], d.subjects()[0], d.subjects()[1]},
                                            {d.responses()[2], d.responses()[0], d.responses()[1]}, d.coordinates(),
                                            d.condition_ids());
  SearchlightConfig config;
  config.radius_mm = 1.5;
  const auto a = searchlight_rsa(d, vol.model, config);
  const auto b = searchlight_rsa(swapped, vol.model, config);
  const std::size_t from[] = {2, 0, 1};
  for (std::size_t r = 0; r < 3; ++r) {
    const auto x = b.per_subject_scores.row(r);
    const auto y = a.per_subject_scores.row(from[r]);
    CHECK(std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
  }
  for (std::size_t v = 0; v < a.mean_scores.size(); ++v) {
    if (a.valid(v)) CHECK(std::abs(a.mean_scores[v] - b.mean_scores[v]) <= 1e-15);
    else CHECK_FALSE(b.valid(v));
  }
}

TEST_CASE("radius below the voxel spacing leaves nothing valid") {
  const auto vol = synth::planted_volume(7, 6);
  SearchlightConfig config;
  config.radius_mm = 0.5;
  config.min_voxels = 5;
  try {
    searchlight_rsa(vol.data, vol.model, config);
    FAIL("expected AllCentersInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllCentersInvalid);
  }
}

TEST_CASE("runtime grows linearly with the number of centers") {
  // The doubled volume is two copies of the small one 100 mm apart, so every
  // center keeps exactly the same sphere.
  std::mt19937_64 rng(42);
  const auto block = grid(16, 16, 8);
  Matrix twin(2 * block.rows(), 3);
  for (std::size_t v = 0; v < block.rows(); ++v) {
    for (std::size_t c = 0; c < 3; ++c) {
      twin(v, c) = block(v, c);
      twin(block.rows() + v, c) = block(v, c) + (c == 2 ? 100.0 : 0.0);
    }
  }
  const auto small = VoxelDataset::create({"s"}, {synth::normal_matrix(10, block.rows(), rng)}, block, synth::ids(10));
  const auto large = VoxelDataset::create({"s"}, {synth::normal_matrix(10, twin.rows(), rng)}, twin, synth::ids(10));
  const auto model = synth::random_rdm(10, rng);
  SearchlightConfig config;
  config.radius_mm = 1.5;
  config.workers = 1;
  auto best_time = [&](const VoxelDataset& d) {
    double best = 1e300;
    for (int rep = 0; rep < 9; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto map = searchlight_rsa(d, model, config);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      best = std::min(best, dt.count());
    }
    return best;
  };
  const double ratio = best_time(large) / best_time(small);
  MESSAGE("runtime ratio for doubled centers: " << ratio);
  CHECK(ratio <= 2.2);
}
