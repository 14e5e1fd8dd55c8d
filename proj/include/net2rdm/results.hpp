#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "net2rdm/core_model.hpp"
#include "net2rdm/wrsa.hpp"

namespace net2rdm {

inline constexpr const char* kToolName = "net2rdm";
inline constexpr const char* kToolVersion = "0.1.0";

struct ModelComparison {
  std::string model_a;
  std::string layer_a;
  std::string model_b;
  std::string layer_b;
  double p_value = 1.0;
  bool operator==(const ModelComparison&) const = default;
};

/// Everything one analysis run persists. `created` stays empty unless the
/// caller asks for a wall-clock stamp, so reruns serialize identically.
struct ResultsDocument {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<EvaluationResult> results;
  std::vector<WrsaResult> wrsa_results;
  std::vector<ModelComparison> comparisons;
  std::optional<NoiseCeiling> noise_ceiling;
  std::optional<std::string> created;

  bool operator==(const ResultsDocument&) const = default;
};

/// Sorted keys, two-space indent, shortest round-trip floats, trailing newline.
std::string serialize_results(const ResultsDocument& doc);
ResultsDocument parse_results(const std::string& text);

/// One row per model/layer/subject (RSA) or model/subject (weighted RSA).
std::string results_csv(const ResultsDocument& doc);

/// One row per subject/fold/predictor weight.
std::string weights_csv(const std::vector<WrsaResult>& results);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace net2rdm
