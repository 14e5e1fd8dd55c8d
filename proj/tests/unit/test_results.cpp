#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "net2rdm/results.hpp"
#include "net2rdm/rsa.hpp"
#include "net2rdm/wrsa.hpp"
#include "synthetic.hpp"

using namespace net2rdm;

TEST_CASE("shortest round-trip doubles") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  std::mt19937_64 rng(70);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const auto text = format_double(v);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == v);
  }
}

TEST_CASE("results document round trip") {
  std::mt19937_64 rng(71);
  const auto truth = synth::random_rdm(12, rng);
  const auto brain = synth::noisy_stack(truth, 4, 0.2, rng);
  ResultsDocument doc;
  doc.command = "rsa";
  doc.config = {{"seed", 3}, {"fdr_q", 0.05}};
  RsaConfig rc;
  rc.permutation = PermutationScheme::exact();
  doc.results = rsa_evaluate("m", {{"a", truth}, {"b", synth::random_rdm(12, rng)}}, brain, rc);
  WrsaConfig wc;
  wc.n_folds = 3;
  doc.wrsa_results.push_back(wrsa_evaluate("m", {{"a", truth}, {"b", synth::random_rdm(12, rng)}}, brain, wc));
  doc.comparisons.push_back({"m", "a", "m", "b", 0.0625});
  doc.noise_ceiling = noise_ceiling(brain);

  const auto text = serialize_results(doc);
  CHECK(parse_results(text) == doc);
  CHECK(serialize_results(parse_results(text)) == text);
  CHECK(text.find("\"created\": null") != std::string::npos);

  doc.created = "2026-01-01T00:00:00Z";
  CHECK(parse_results(serialize_results(doc)) == doc);
}

TEST_CASE("csv tables") {
  EvaluationResult r;
  r.model_id = "net,v2";
  r.layer_name = "L";
  r.roi_name = "V1";
  r.subjects = {"s1", "s2"};
  r.per_subject_rho = {0.5, -0.25};
  r.per_subject_score = {0.25, -0.0625};
  r.mean_score = 0.09375;
  ResultsDocument doc;
  doc.results.push_back(r);
  const auto csv = results_csv(doc);
  CHECK(csv.rfind("model,layer,roi,subject,rho,score,", 0) == 0);
  CHECK(csv.find("\"net,v2\",L,V1,s2,-0.25,-0.0625,0.09375,,,false,,\n") != std::string::npos);

  WrsaResult w;
  w.model_id = "m";
  w.predictor_names = {"a", "b"};
  w.subjects = {"s1"};
  w.per_subject_folds = {{WrsaFold{0, {0.5, 0.0}, 0.9, true, ""}}};
  CHECK(weights_csv({w}) == "model,subject,fold,predictor,weight,fold_r\nm,s1,0,a,0.5,0.9\nm,s1,0,b,0,0.9\n");
}
