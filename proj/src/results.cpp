#include "net2rdm/results.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "net2rdm/error.hpp"

namespace net2rdm {

using nlohmann::json;

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json ceiling_json(const std::optional<NoiseCeiling>& nc) {
  if (!nc) return nullptr;
  return {{"lower", nc->lower}, {"upper", nc->upper}};
}

std::optional<NoiseCeiling> ceiling_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto& c = j.at(key);
  return NoiseCeiling{c.at("lower").get<double>(), c.at("upper").get<double>()};
}

json evaluation_json(const EvaluationResult& r) {
  return {{"model_id", r.model_id},
          {"layer_name", r.layer_name},
          {"roi_name", r.roi_name},
          {"subjects", r.subjects},
          {"per_subject_rho", r.per_subject_rho},
          {"per_subject_score", r.per_subject_score},
          {"mean_score", r.mean_score},
          {"sem", optional_json(r.sem)},
          {"p_value", optional_json(r.p_value)},
          {"significant", r.significant},
          {"noise_ceiling", ceiling_json(r.noise_ceiling)}};
}

EvaluationResult evaluation_from(const json& j) {
  EvaluationResult r;
  r.model_id = j.at("model_id").get<std::string>();
  r.layer_name = j.at("layer_name").get<std::string>();
  r.roi_name = j.at("roi_name").get<std::string>();
  r.subjects = j.at("subjects").get<std::vector<std::string>>();
  r.per_subject_rho = j.at("per_subject_rho").get<std::vector<double>>();
  r.per_subject_score = j.at("per_subject_score").get<std::vector<double>>();
  r.mean_score = j.at("mean_score").get<double>();
  r.sem = optional_from<double>(j, "sem");
  r.p_value = optional_from<double>(j, "p_value");
  r.significant = j.at("significant").get<bool>();
  r.noise_ceiling = ceiling_from(j, "noise_ceiling");
  return r;
}

json fold_json(const WrsaFold& f) {
  return {{"fold", f.fold},
          {"weights", f.weights},
          {"r", optional_json(f.r)},
          {"converged", f.converged},
          {"warning", f.warning}};
}

WrsaFold fold_from(const json& j) {
  WrsaFold f;
  f.fold = j.at("fold").get<std::size_t>();
  f.weights = j.at("weights").get<std::vector<double>>();
  f.r = optional_from<double>(j, "r");
  f.converged = j.at("converged").get<bool>();
  f.warning = j.at("warning").get<std::string>();
  return f;
}

json wrsa_json(const WrsaResult& r) {
  json folds = json::array();
  for (const auto& subject : r.per_subject_folds) {
    json row = json::array();
    for (const auto& f : subject) row.push_back(fold_json(f));
    folds.push_back(std::move(row));
  }
  return {{"model_id", r.model_id},
          {"roi_name", r.roi_name},
          {"predictor_names", r.predictor_names},
          {"subjects", r.subjects},
          {"folds", r.folds},
          {"per_subject_folds", std::move(folds)},
          {"per_subject_mean_r", r.per_subject_mean_r},
          {"per_subject_score", r.per_subject_score},
          {"mean_score", r.mean_score},
          {"sem", optional_json(r.sem)},
          {"p_value", optional_json(r.p_value)},
          {"significant", r.significant},
          {"noise_ceiling", ceiling_json(r.noise_ceiling)},
          {"warnings", r.warnings}};
}

WrsaResult wrsa_from(const json& j) {
  WrsaResult r;
  r.model_id = j.at("model_id").get<std::string>();
  r.roi_name = j.at("roi_name").get<std::string>();
  r.predictor_names = j.at("predictor_names").get<std::vector<std::string>>();
  r.subjects = j.at("subjects").get<std::vector<std::string>>();
  r.folds = j.at("folds").get<std::vector<std::vector<std::size_t>>>();
  for (const auto& subject : j.at("per_subject_folds")) {
    std::vector<WrsaFold> row;
    for (const auto& f : subject) row.push_back(fold_from(f));
    r.per_subject_folds.push_back(std::move(row));
  }
  r.per_subject_mean_r = j.at("per_subject_mean_r").get<std::vector<double>>();
  r.per_subject_score = j.at("per_subject_score").get<std::vector<double>>();
  r.mean_score = j.at("mean_score").get<double>();
  r.sem = optional_from<double>(j, "sem");
  r.p_value = optional_from<double>(j, "p_value");
  r.significant = j.at("significant").get<bool>();
  r.noise_ceiling = ceiling_from(j, "noise_ceiling");
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string serialize_results(const ResultsDocument& doc) {
  json results = json::array();
  for (const auto& r : doc.results) results.push_back(evaluation_json(r));
  json wrsa = json::array();
  for (const auto& r : doc.wrsa_results) wrsa.push_back(wrsa_json(r));
  json comparisons = json::array();
  for (const auto& c : doc.comparisons) {
    comparisons.push_back({{"model_a", c.model_a},
                           {"layer_a", c.layer_a},
                           {"model_b", c.model_b},
                           {"layer_b", c.layer_b},
                           {"p_value", c.p_value}});
  }
  const json j = {{"tool", doc.tool},
                  {"version", doc.version},
                  {"command", doc.command},
                  {"config", doc.config},
                  {"results", std::move(results)},
                  {"wrsa_results", std::move(wrsa)},
                  {"comparisons", std::move(comparisons)},
                  {"noise_ceiling", ceiling_json(doc.noise_ceiling)},
                  {"created", optional_json(doc.created)}};
  return j.dump(2) + "\n";
}

ResultsDocument parse_results(const std::string& text) {
  try {
    const json j = json::parse(text);
    ResultsDocument doc;
    doc.tool = j.at("tool").get<std::string>();
    doc.version = j.at("version").get<std::string>();
    doc.command = j.at("command").get<std::string>();
    doc.config = j.at("config");
    for (const auto& r : j.at("results")) doc.results.push_back(evaluation_from(r));
    for (const auto& r : j.at("wrsa_results")) doc.wrsa_results.push_back(wrsa_from(r));
    for (const auto& c : j.at("comparisons")) {
      doc.comparisons.push_back({c.at("model_a").get<std::string>(), c.at("layer_a").get<std::string>(),
                                 c.at("model_b").get<std::string>(), c.at("layer_b").get<std::string>(),
                                 c.at("p_value").get<double>()});
    }
    doc.noise_ceiling = ceiling_from(j, "noise_ceiling");
    doc.created = optional_from<std::string>(j, "created");
    return doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::ManifestError, std::string("malformed results document: ") + e.what());
  }
}

std::string results_csv(const ResultsDocument& doc) {
  std::ostringstream out;
  auto ceiling_cells = [](const std::optional<NoiseCeiling>& nc) {
    return nc ? format_double(nc->lower) + "," + format_double(nc->upper) : std::string(",");
  };
  if (!doc.wrsa_results.empty()) {
    out << "model,roi,subject,mean_fold_r,score,mean_score,sem,p_value,significant,noise_ceiling_lower,"
           "noise_ceiling_upper\n";
    for (const auto& r : doc.wrsa_results) {
      for (std::size_t s = 0; s < r.subjects.size(); ++s) {
        out << csv_field(r.model_id) << ',' << csv_field(r.roi_name) << ',' << csv_field(r.subjects[s]) << ','
            << format_double(r.per_subject_mean_r[s]) << ',' << format_double(r.per_subject_score[s]) << ','
            << format_double(r.mean_score) << ',' << csv_optional(r.sem) << ',' << csv_optional(r.p_value) << ','
            << (r.significant ? "true" : "false") << ',' << ceiling_cells(r.noise_ceiling) << '\n';
      }
    }
    return out.str();
  }
  out << "model,layer,roi,subject,rho,score,mean_score,sem,p_value,significant,noise_ceiling_lower,"
         "noise_ceiling_upper\n";
  for (const auto& r : doc.results) {
    for (std::size_t s = 0; s < r.subjects.size(); ++s) {
      out << csv_field(r.model_id) << ',' << csv_field(r.layer_name) << ',' << csv_field(r.roi_name) << ','
          << csv_field(r.subjects[s]) << ',' << format_double(r.per_subject_rho[s]) << ','
          << format_double(r.per_subject_score[s]) << ',' << format_double(r.mean_score) << ','
          << csv_optional(r.sem) << ',' << csv_optional(r.p_value) << ',' << (r.significant ? "true" : "false")
          << ',' << ceiling_cells(r.noise_ceiling) << '\n';
    }
  }
  return out.str();
}

std::string weights_csv(const std::vector<WrsaResult>& results) {
  std::ostringstream out;
  out << "model,subject,fold,predictor,weight,fold_r\n";
  for (const auto& r : results) {
    for (std::size_t s = 0; s < r.subjects.size(); ++s) {
      for (const auto& f : r.per_subject_folds[s]) {
        for (std::size_t p = 0; p < f.weights.size(); ++p) {
          out << csv_field(r.model_id) << ',' << csv_field(r.subjects[s]) << ',' << f.fold << ','
              << csv_field(r.predictor_names[p]) << ',' << format_double(f.weights[p]) << ','
              << csv_optional(f.r) << '\n';
        }
      }
    }
  }
  return out.str();
}

}  // namespace net2rdm
