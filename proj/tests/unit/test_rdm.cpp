#include <doctest.h>

#include <random>

#include "net2rdm/error.hpp"
#include "net2rdm/rdm.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace net2rdm;

TEST_CASE("correlation distance of scaled and reversed rows") {
  const Matrix m(3, 3, std::vector<double>{1, 2, 3, 2, 4, 6, 3, 2, 1});
  const auto r = compute_rdm_values(m, DissimilarityMetric::correlation);
  CHECK(r(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r(0, 2) == doctest::Approx(2.0));
}

TEST_CASE("random 4x3 matches the per-pair oracle for every metric") {
  std::mt19937_64 rng(7);
  const auto act = synth::normal_matrix(4, 3, rng);
  const DissimilarityMetric metrics[] = {DissimilarityMetric::correlation, DissimilarityMetric::euclidean,
                                         DissimilarityMetric::cosine};
  for (int k = 0; k < 3; ++k) {
    const auto got = compute_rdm_values(act, metrics[k]);
    const auto want = oracle::rdm(act, k);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(got(i, j) - want(i, j)) <= 1e-12);
  }
}

TEST_CASE("rdm is symmetric with a zero diagonal") {
  std::mt19937_64 rng(8);
  const auto r = compute_rdm_values(synth::normal_matrix(9, 5, rng), DissimilarityMetric::euclidean);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(r(i, i) == 0.0);
    for (std::size_t j = 0; j < 9; ++j) CHECK(r(i, j) == r(j, i));
  }
}

TEST_CASE("permuting rows permutes the rdm") {
  std::mt19937_64 rng(9);
  const auto act = synth::normal_matrix(7, 6, rng);
  std::vector<std::size_t> perm{3, 0, 6, 1, 5, 2, 4};
  Matrix shuffled(7, 6);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t c = 0; c < 6; ++c) shuffled(i, c) = act(perm[i], c);
  const auto a = compute_rdm_values(act, DissimilarityMetric::correlation);
  const auto b = compute_rdm_values(shuffled, DissimilarityMetric::correlation);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) CHECK(b(i, j) == a(perm[i], perm[j]));
}

TEST_CASE("parallel and serial kernels agree bit for bit") {
  std::mt19937_64 rng(10);
  const auto act = synth::normal_matrix(40, 33, rng);
  for (auto metric : {DissimilarityMetric::correlation, DissimilarityMetric::euclidean, DissimilarityMetric::cosine}) {
    const auto ref = serial::compute_rdm_values(act, metric);
    CHECK(compute_rdm_values(act, metric, 1) == ref);
    CHECK(compute_rdm_values(act, metric, 8) == ref);
  }
}

TEST_CASE("metric preconditions") {
  const Matrix constant_row(3, 3, std::vector<double>{1, 1, 1, 1, 2, 3, 3, 1, 2});
  CHECK_THROWS_AS(compute_rdm_values(constant_row, DissimilarityMetric::correlation), Error);
  CHECK_NOTHROW(compute_rdm_values(constant_row, DissimilarityMetric::euclidean));
  const Matrix zero_row(3, 2, std::vector<double>{0, 0, 1, 2, 2, 1});
  try {
    compute_rdm_values(zero_row, DissimilarityMetric::cosine);
    FAIL("expected ZeroNormRow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroNormRow);
  }
  CHECK_THROWS_AS(parse_metric("manhattan"), Error);
  CHECK(parse_metric("cosine") == DissimilarityMetric::cosine);
}

TEST_CASE("flatten order and round trip") {
  Matrix m(3, 3, 0.0);
  m(0, 1) = m(1, 0) = 1.5;
  m(0, 2) = m(2, 0) = 2.5;
  m(1, 2) = m(2, 1) = 3.5;
  CHECK(flatten_upper(m) == std::vector<double>{1.5, 2.5, 3.5});
  CHECK(flatten_upper(Matrix(4, 4, 0.0)).size() == 6);

  std::mt19937_64 rng(11);
  const auto u = flatten_upper(synth::random_rdm(8, rng));
  CHECK(flatten_upper(unflatten_upper(u, 8)) == u);
}

TEST_CASE("average of rdms") {
  std::mt19937_64 rng(12);
  const auto a = synth::random_rdm(5, rng);
  std::vector<Rdm> same{a, a};
  CHECK(average_rdms(same) == a);

  std::vector<Rdm> ones_threes{synth::rdm_from_upper(std::vector<double>(6, 1.0), 4),
                               synth::rdm_from_upper(std::vector<double>(6, 3.0), 4)};
  CHECK(flatten_upper(average_rdms(ones_threes)) == std::vector<double>(6, 2.0));

  std::vector<Rdm> five;
  for (int k = 0; k < 5; ++k) five.push_back(synth::random_rdm(5, rng));
  const auto avg = average_rdms(five);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0.0;
      for (const auto& r : five) s += r(i, j);
      CHECK(avg(i, j) == s / 5.0);
    }
  }
}
