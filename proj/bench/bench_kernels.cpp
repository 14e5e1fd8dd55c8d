// Serial reference kernels versus their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "net2rdm/rdm.hpp"
#include "net2rdm/searchlight.hpp"

namespace {

using namespace net2rdm;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (auto& v : m.data()) v = normal(rng);
  return m;
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("c" + std::to_string(i));
  return out;
}

struct Volume {
  VoxelDataset data;
  Rdm model;
};

Volume make_volume(std::size_t edge, std::size_t n_cond, std::size_t n_subjects) {
  const std::size_t n_vox = edge * edge * edge;
  Matrix coords(n_vox, 3);
  for (std::size_t v = 0; v < n_vox; ++v) {
    coords(v, 0) = 2.0 * static_cast<double>(v % edge);
    coords(v, 1) = 2.0 * static_cast<double>((v / edge) % edge);
    coords(v, 2) = 2.0 * static_cast<double>(v / (edge * edge));
  }
  std::vector<std::string> subjects;
  std::vector<Matrix> responses;
  for (std::size_t s = 0; s < n_subjects; ++s) {
    subjects.push_back("s" + std::to_string(s));
    responses.push_back(random_matrix(n_cond, n_vox, 100 + s));
  }
  auto model = compute_rdm(random_matrix(n_cond, 20, 7), DissimilarityMetric::correlation, ids(n_cond));
  return {VoxelDataset::create(subjects, std::move(responses), std::move(coords), ids(n_cond)), std::move(model)};
}

void BM_RdmSerial(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 512, 1);
  for (auto _ : state) benchmark::DoNotOptimize(serial::compute_rdm_values(m, DissimilarityMetric::correlation));
}
void BM_RdmParallel(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 512, 1);
  for (auto _ : state) benchmark::DoNotOptimize(compute_rdm_values(m, DissimilarityMetric::correlation));
}
BENCHMARK(BM_RdmSerial)->Arg(64)->Arg(256);
BENCHMARK(BM_RdmParallel)->Arg(64)->Arg(256);

void BM_SpheresBruteForce(benchmark::State& state) {
  const auto vol = make_volume(static_cast<std::size_t>(state.range(0)), 8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(serial::build_spheres(vol.data.coordinates(), 6.0));
}
void BM_SpheresGrid(benchmark::State& state) {
  const auto vol = make_volume(static_cast<std::size_t>(state.range(0)), 8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_spheres(vol.data.coordinates(), 6.0));
}
BENCHMARK(BM_SpheresBruteForce)->Arg(12)->Arg(20);
BENCHMARK(BM_SpheresGrid)->Arg(12)->Arg(20);

void BM_SearchlightSerial(benchmark::State& state) {
  const auto vol = make_volume(static_cast<std::size_t>(state.range(0)), 16, 3);
  SearchlightConfig config;
  config.radius_mm = 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(serial::searchlight_rsa(vol.data, vol.model, config));
}
void BM_SearchlightParallel(benchmark::State& state) {
  const auto vol = make_volume(static_cast<std::size_t>(state.range(0)), 16, 3);
  SearchlightConfig config;
  config.radius_mm = 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(searchlight_rsa(vol.data, vol.model, config));
}
BENCHMARK(BM_SearchlightSerial)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchlightParallel)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
