#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "net2rdm/error.hpp"
#include "net2rdm/wrsa.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace net2rdm;

namespace {

Matrix columns_to_matrix(const std::vector<std::vector<double>>& cols) {
  Matrix m(cols[0].size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < cols[c].size(); ++r) m(r, c) = cols[c][r];
  return m;
}

Rdm combine(const std::vector<Rdm>& parts, const std::vector<double>& w) {
  std::vector<double> u(parts[0].size() * (parts[0].size() - 1) / 2, 0.0);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto pu = flatten_upper(parts[p]);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += w[p] * pu[k];
  }
  return synth::rdm_from_upper(u, parts[0].size());
}

// Held-out r recomputed from the reported weights.
double fold_r_oracle(const std::vector<Rdm>& predictors, const std::vector<double>& w, const Rdm& observed,
                     const std::vector<std::size_t>& fold) {
  std::vector<double> pred, obs;
  for (std::size_t a = 0; a < fold.size(); ++a) {
    for (std::size_t b = a + 1; b < fold.size(); ++b) {
      double p = 0.0;
      for (std::size_t k = 0; k < predictors.size(); ++k) p += w[k] * predictors[k](fold[a], fold[b]);
      pred.push_back(p);
      obs.push_back(observed(fold[a], fold[b]));
    }
  }
  return oracle::pearson(pred, obs);
}

}  // namespace

TEST_CASE("condition folds") {
  const auto ten = condition_folds(10, 5, 3);
  for (const auto& f : ten) CHECK(f.size() == 2);

  const auto seven = condition_folds(7, 3, 3);
  std::multiset<std::size_t> sizes;
  std::set<std::size_t> seen;
  for (const auto& f : seven) {
    sizes.insert(f.size());
    CHECK(std::is_sorted(f.begin(), f.end()));
    seen.insert(f.begin(), f.end());
  }
  CHECK(sizes == std::multiset<std::size_t>{2, 2, 3});
  CHECK(seen.size() == 7);
  CHECK(condition_folds(7, 3, 3) == seven);
  CHECK_THROWS_AS(condition_folds(3, 4, 0), Error);
}

TEST_CASE("pair split never uses straddling pairs") {
  const std::size_t n = 13;
  const auto folds = condition_folds(n, 4, 11);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto split = split_pairs(n, folds, f);
    const std::size_t inside = folds[f].size();
    const std::size_t outside = n - inside;
    CHECK(split.test.size() == inside * (inside - 1) / 2);
    CHECK(split.train.size() == outside * (outside - 1) / 2);
    std::set<std::size_t> test(split.test.begin(), split.test.end());
    for (std::size_t k : split.train) CHECK(test.count(k) == 0);
  }
}

TEST_CASE("nnls on exactly representable targets") {
  std::mt19937_64 rng(30);
  std::normal_distribution<double> normal;
  std::vector<double> y(40);
  for (auto& v : y) v = std::abs(normal(rng)) + 0.1;
  std::vector<double> neg(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) neg[i] = -y[i];

  const auto same = nnls_fit(columns_to_matrix({y}), y);
  CHECK(same.converged);
  CHECK(std::abs(same.weights[0] - 1.0) <= 1e-8);

  const auto opposite = nnls_fit(columns_to_matrix({neg}), y);
  CHECK(opposite.weights[0] == 0.0);
  CHECK_FALSE(std::signbit(opposite.weights[0]));

  std::vector<double> a(60), b(60), t(60);
  for (std::size_t i = 0; i < 60; ++i) {
    a[i] = normal(rng);
    b[i] = normal(rng);
    t[i] = 0.3 * a[i] + 0.7 * b[i];
  }
  const auto fit = nnls_fit(columns_to_matrix({a, b}), t);
  CHECK(std::abs(fit.weights[0] - 0.3) <= 1e-6);
  CHECK(std::abs(fit.weights[1] - 0.7) <= 1e-6);
  const auto ref = oracle::nnls2(a, b, t);
  CHECK(std::abs(fit.weights[0] - ref[0]) <= 1e-6);
  CHECK(std::abs(fit.weights[1] - ref[1]) <= 1e-6);
}

TEST_CASE("nnls agrees with the active-set oracle when a constraint binds") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(30), b(30), y(30);
    for (std::size_t i = 0; i < 30; ++i) {
      a[i] = normal(rng);
      b[i] = normal(rng);
      y[i] = normal(rng);
    }
    const auto fit = nnls_fit(columns_to_matrix({a, b}), y, 1e-12, 100000);
    const auto ref = oracle::nnls2(a, b, y);
    CHECK(fit.weights[0] >= 0.0);
    CHECK(fit.weights[1] >= 0.0);
    CHECK(std::abs(fit.weights[0] - ref[0]) <= 1e-6);
    CHECK(std::abs(fit.weights[1] - ref[1]) <= 1e-6);
  }
}

TEST_CASE("brain equal to one predictor generalises perfectly") {
  std::mt19937_64 rng(32);
  const auto p = synth::random_rdm(20, rng);
  const auto brain = SubjectRdmStack::create("roi", {"s1", "s2"}, {p, p});
  const auto res = wrsa_evaluate("m", {{"p", p}}, brain, WrsaConfig{});
  for (const auto& subject : res.per_subject_folds)
    for (const auto& f : subject) CHECK(*f.r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("non-negative mixture is recovered and held-out r matches an oracle") {
  std::mt19937_64 rng(33);
  const std::vector<Rdm> parts{synth::random_rdm(20, rng), synth::random_rdm(20, rng)};
  const auto brain_rdm = combine(parts, {0.4, 0.6});
  const auto brain = SubjectRdmStack::create("roi", {"s1", "s2", "s3"}, {brain_rdm, brain_rdm, brain_rdm});
  const auto res = wrsa_evaluate("m", {{"A", parts[0]}, {"B", parts[1]}}, brain, WrsaConfig{});
  for (double r : res.per_subject_mean_r) CHECK(r >= 0.999);
  for (std::size_t s = 0; s < 3; ++s) {
    for (const auto& f : res.per_subject_folds[s]) {
      REQUIRE(f.r.has_value());
      CHECK(std::abs(*f.r - fold_r_oracle(parts, f.weights, brain_rdm, res.folds[f.fold])) <= 1e-12);
    }
  }
}

TEST_CASE("independent predictor gives r near zero") {
  std::mt19937_64 rng(34);
  const auto p = synth::random_rdm(10, rng);
  const auto brain = SubjectRdmStack::create("roi", {"s1"}, {synth::random_rdm(10, rng)});
  WrsaConfig config;
  config.n_folds = 2;
  const auto res = wrsa_evaluate("m", {{"p", p}}, brain, config);
  CHECK(std::abs(res.per_subject_mean_r[0]) < 0.5);
}

TEST_CASE("scaling a predictor rescales its weight only") {
  std::mt19937_64 rng(35);
  std::vector<Rdm> parts{synth::random_rdm(16, rng), synth::random_rdm(16, rng), synth::random_rdm(16, rng)};
  const auto brain = synth::noisy_stack(combine(parts, {0.5, 0.2, 0.3}), 2, 0.05, rng);
  WrsaConfig config;
  config.n_folds = 4;
  config.nnls_tolerance = 1e-13;
  config.nnls_max_iterations = 200000;
  auto named = [](const std::vector<Rdm>& ps) {
    return std::vector<NamedRdm>{{"a", ps[0]}, {"b", ps[1]}, {"c", ps[2]}};
  };
  const auto base = wrsa_evaluate("m", named(parts), brain, config);
  const double c = 3.5;
  auto scaled_parts = parts;
  auto u = flatten_upper(parts[1]);
  for (auto& v : u) v *= c;
  scaled_parts[1] = synth::rdm_from_upper(u, 16);
  const auto scaled = wrsa_evaluate("m", named(scaled_parts), brain, config);

  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t f = 0; f < 4; ++f) {
      const auto& x = base.per_subject_folds[s][f];
      const auto& y = scaled.per_subject_folds[s][f];
      CHECK(std::abs(*x.r - *y.r) <= 1e-8);
      CHECK(std::abs(y.weights[1] * c - x.weights[1]) <= 1e-8);
      for (double w : y.weights) CHECK_FALSE(std::signbit(w));
    }
  }
}

TEST_CASE("weighted rsa is deterministic across runs and worker counts") {
  std::mt19937_64 rng(36);
  std::vector<Rdm> parts{synth::random_rdm(12, rng), synth::random_rdm(12, rng)};
  const auto brain = synth::noisy_stack(combine(parts, {1.0, 0.5}), 4, 0.1, rng);
  WrsaConfig config;
  config.n_folds = 3;
  config.seed = 99;
  config.workers = 1;
  const auto one = wrsa_evaluate("m", {{"a", parts[0]}, {"b", parts[1]}}, brain, config);
  config.workers = 8;
  const auto eight = wrsa_evaluate("m", {{"a", parts[0]}, {"b", parts[1]}}, brain, config);
  CHECK(one == eight);
  CHECK(one.folds == condition_folds(12, 3, 99));
}

TEST_CASE("too many folds") {
  std::mt19937_64 rng(37);
  const auto p = synth::random_rdm(6, rng);
  const auto brain = SubjectRdmStack::create("roi", {"s"}, {p});
  WrsaConfig config;
  config.n_folds = 7;
  try {
    wrsa_evaluate("m", {{"p", p}}, brain, config);
    FAIL("expected TooManyFolds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooManyFolds);
  }
}
