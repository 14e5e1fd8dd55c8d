#include <doctest.h>

#include <random>

#include "net2rdm/error.hpp"
#include "net2rdm/rsa.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace net2rdm;

namespace {

RsaConfig exact_config() {
  RsaConfig c;
  c.permutation = PermutationScheme::exact();
  return c;
}

}  // namespace

TEST_CASE("perfect model") {
  std::mt19937_64 rng(20);
  const auto truth = synth::random_rdm(8, rng);
  const auto brain = SubjectRdmStack::create("roi", {"a", "b", "c"}, {truth, truth, truth});
  const auto res = rsa_evaluate("m", {{"L", truth}}, brain, exact_config());
  REQUIRE(res.size() == 1);
  CHECK(res[0].per_subject_rho == std::vector<double>(3, 1.0));
  CHECK(res[0].per_subject_score == std::vector<double>(3, 1.0));
  CHECK(res[0].mean_score == 1.0);
  CHECK(res[0].sem == 0.0);
  CHECK(res[0].noise_ceiling == NoiseCeiling{1.0, 1.0});
}

TEST_CASE("rank reversal gives -1") {
  std::mt19937_64 rng(21);
  const auto subject = synth::random_rdm(6, rng);
  auto u = flatten_upper(subject);
  for (auto& v : u) v = 10.0 - v;
  const auto reversed = synth::rdm_from_upper(u, 6);
  const auto brain = SubjectRdmStack::create("roi", {"only"}, {subject});
  const auto res = rsa_evaluate("m", {{"L", reversed}}, brain, exact_config());
  CHECK(res[0].per_subject_rho[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(res[0].per_subject_score[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_FALSE(res[0].sem.has_value());
  CHECK_FALSE(res[0].p_value.has_value());
  CHECK_FALSE(res[0].noise_ceiling.has_value());
}

TEST_CASE("planted layer beats a random layer and matches a scalar re-implementation") {
  std::mt19937_64 rng(22);
  const auto planted = synth::random_rdm(10, rng);
  const auto unrelated = synth::random_rdm(10, rng);
  const auto brain = synth::noisy_stack(planted, 3, 0.05, rng);
  const auto res = rsa_evaluate("m", {{"planted", planted}, {"random", unrelated}}, brain, exact_config());
  CHECK(res[0].mean_score > res[1].mean_score);

  for (std::size_t l = 0; l < 2; ++l) {
    const auto model = oracle::upper((l == 0 ? planted : unrelated).values());
    double total = 0.0;
    for (std::size_t s = 0; s < 3; ++s) {
      const double rho = oracle::spearman(model, oracle::upper(brain.rdms()[s].values()));
      CHECK(std::abs(res[l].per_subject_rho[s] - rho) <= 1e-12);
      total += oracle::signed_square(rho);
    }
    CHECK(std::abs(res[l].mean_score - total / 3.0) <= 1e-12);
  }
}

TEST_CASE("noise ceiling") {
  std::mt19937_64 rng(23);
  const auto truth = synth::random_rdm(7, rng);
  const auto same = SubjectRdmStack::create("roi", {"a", "b", "c"}, {truth, truth, truth});
  CHECK(noise_ceiling(same) == NoiseCeiling{1.0, 1.0});

  const auto two = SubjectRdmStack::create("roi", {"a", "b"}, {synth::random_rdm(7, rng), synth::random_rdm(7, rng)});
  const auto nc2 = noise_ceiling(two);
  CHECK(nc2.lower <= nc2.upper);
  CHECK(std::isfinite(nc2.lower));
  CHECK(std::isfinite(nc2.upper));

  const auto three = synth::noisy_stack(truth, 3, 0.2, rng);
  std::vector<Matrix> mats;
  for (const auto& r : three.rdms()) mats.push_back(r.values());
  const auto want = oracle::noise_ceiling(mats);
  const auto got = noise_ceiling(three);
  CHECK(std::abs(got.lower - want.lower) <= 1e-12);
  CHECK(std::abs(got.upper - want.upper) <= 1e-12);

  CHECK_THROWS_AS(noise_ceiling(SubjectRdmStack::create("roi", {"a"}, {truth})), Error);
}

TEST_CASE("compare models") {
  EvaluationResult a;
  a.roi_name = "roi";
  a.subjects = {"1", "2", "3", "4", "5"};
  a.per_subject_score = {0.1, 0.2, 0.15, 0.3, 0.05};
  CHECK(compare_models(a, a, PermutationScheme::exact()) == 1.0);

  auto b = a;
  for (auto& s : b.per_subject_score) s -= 0.1;
  CHECK(compare_models(a, b, PermutationScheme::exact()) == 0.0625);

  auto shuffled = b;
  std::swap(shuffled.subjects[0], shuffled.subjects[1]);
  try {
    compare_models(a, shuffled, PermutationScheme::exact());
    FAIL("expected SubjectMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SubjectMismatch);
  }
}

TEST_CASE("fdr spans every layer of every model") {
  std::mt19937_64 rng(24);
  const auto truth = synth::random_rdm(9, rng);
  const auto brain = synth::noisy_stack(truth, 6, 0.05, rng);
  ModelRdms m1{"m1", {{"good", truth}, {"bad", synth::random_rdm(9, rng)}}};
  ModelRdms m2{"m2", {{"x", synth::random_rdm(9, rng)}}};
  const auto res = rsa_evaluate({m1, m2}, brain, exact_config());
  REQUIRE(res.size() == 3);
  std::vector<double> p;
  for (const auto& r : res) p.push_back(*r.p_value);
  const auto flags = oracle::step_up(p, 0.05);
  for (std::size_t i = 0; i < 3; ++i) CHECK(res[i].significant == flags[i]);
  CHECK(res[0].model_id == "m1");
  CHECK(res[2].layer_name == "x");
}

TEST_CASE("results do not depend on the worker count") {
  std::mt19937_64 rng(25);
  const auto truth = synth::random_rdm(8, rng);
  const auto brain = synth::noisy_stack(truth, 14, 0.3, rng);
  std::vector<NamedRdm> layers;
  for (int l = 0; l < 5; ++l) layers.push_back({"L" + std::to_string(l), synth::add_noise(truth, 0.05 + 0.2 * l, rng)});
  RsaConfig c;
  c.permutation = PermutationScheme::monte_carlo(2000, 9);
  c.workers = 1;
  const auto one = rsa_evaluate("m", layers, brain, c);
  c.workers = 8;
  CHECK(rsa_evaluate("m", layers, brain, c) == one);
}
