#include "net2rdm/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "net2rdm/manifest.hpp"
#include "net2rdm/npy.hpp"
#include "net2rdm/parallel.hpp"
#include "net2rdm/rdm.hpp"
#include "net2rdm/report.hpp"
#include "net2rdm/results.hpp"
#include "net2rdm/rsa.hpp"
#include "net2rdm/searchlight.hpp"
#include "net2rdm/wrsa.hpp"

namespace net2rdm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string error_tag(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownMetric: return "E_METRIC";
    case ErrorCode::OutputExists: return "E_EXISTS";
    case ErrorCode::WrongKind: return "E_KIND";
    case ErrorCode::AllCentersInvalid: return "E_EMPTY_MAP";
    case ErrorCode::IoError: return "E_IO";
    case ErrorCode::ManifestError:
    case ErrorCode::BadMagic:
    case ErrorCode::UnsupportedDescr:
    case ErrorCode::FortranOrderUnsupported:
    case ErrorCode::TruncatedPayload:
    case ErrorCode::UnsupportedShape: return "E_FORMAT";
    case ErrorCode::InsufficientOverlap:
    case ErrorCode::ConditionMismatch: return "E_ALIGN";
    case ErrorCode::InvalidArgument: return "E_ARGS";
    default: return "E_DATA";
  }
}

OutputDir::OutputDir(fs::path dir, bool force) : dir_(std::move(dir)) {
  std::error_code ec;
  if (fs::exists(dir_, ec)) {
    if (!fs::is_directory(dir_)) fail(ErrorCode::OutputExists, "'" + dir_.string() + "' exists and is not a directory");
    if (!fs::is_empty(dir_) && !force) {
      fail(ErrorCode::OutputExists, "output directory '" + dir_.string() + "' is not empty (use --force)");
    }
  } else {
    fs::create_directories(dir_, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create '" + dir_.string() + "': " + ec.message());
    created_ = true;
  }
}

OutputDir::~OutputDir() {
  if (committed_) return;
  std::error_code ec;
  for (const auto& f : files_) fs::remove(f, ec);
  if (created_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
}

fs::path OutputDir::file(const std::string& name) {
  files_.push_back(dir_ / name);
  return files_.back();
}

namespace {

struct Common {
  std::string out;
  bool force = false;
  int workers = 0;
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--out", c.out, "Output directory")->required();
  cmd.add_flag("--force", c.force, "Allow writing into a non-empty output directory");
  cmd.add_option("--workers", c.workers, "Worker threads (default: NET2RDM_WORKERS or all cores)")
      ->check(CLI::NonNegativeNumber);
}

int effective_workers(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("NET2RDM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 0;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::optional<std::string> utc_stamp(bool wanted) {
  if (!wanted) return std::nullopt;
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string(buf);
}

SubjectRdmStack load_rdm_brain(const std::string& path) {
  auto brain = load_brain_data(path);
  if (!std::holds_alternative<SubjectRdmStack>(brain)) {
    fail(ErrorCode::WrongKind, "brain manifest '" + path + "' has kind \"voxel\"; this command needs kind \"rdm\"");
  }
  return std::get<SubjectRdmStack>(std::move(brain));
}

json permutation_json(const PermutationScheme& s) {
  const char* mode = s.mode == PermutationScheme::Mode::exact         ? "exact"
                     : s.mode == PermutationScheme::Mode::monte_carlo ? "monte_carlo"
                                                                      : "automatic";
  return {{"mode", mode}, {"n_samples", s.n_samples}, {"seed", s.seed}};
}

PermutationScheme parse_scheme(const std::string& mode, std::uint64_t samples, std::uint64_t seed) {
  PermutationScheme s;
  if (mode == "auto") s.mode = PermutationScheme::Mode::automatic;
  else if (mode == "exact") s.mode = PermutationScheme::Mode::exact;
  else if (mode == "monte-carlo") s.mode = PermutationScheme::Mode::monte_carlo;
  else fail(ErrorCode::InvalidArgument, "unknown permutation mode '" + mode + "'");
  s.n_samples = samples;
  s.seed = seed;
  return s;
}

// ---------------------------------------------------------------- rdm

struct RdmArgs {
  Common common;
  std::string activations;
  std::string metric = "correlation";
};

int cmd_rdm(const RdmArgs& a, std::ostream& out, std::ostream&) {
  const auto metric = parse_metric(a.metric);
  OutputDir dir(a.common.out, a.common.force);
  const auto set = load_activation_set(a.activations);

  RdmManifest manifest;
  manifest.network_id = set.network_id();
  manifest.metric = std::string(to_string(metric));
  manifest.condition_ids = set.stimulus_ids();
  std::set<std::string> used;
  for (const auto& layer : set.layers()) {
    Rdm rdm = [&] {
      try {
        return compute_rdm(layer.activations, metric, set.stimulus_ids(), a.common.workers);
      } catch (const Error& e) {
        throw Error(e.code(), "layer '" + layer.name + "': " + e.what());
      }
    }();
    std::string stem = file_stem_for(layer.name);
    for (int k = 1; used.count(stem); ++k) stem = file_stem_for(layer.name) + "_" + std::to_string(k);
    used.insert(stem);
    const std::string file = stem + ".npy";
    write_npy(dir.file(file), rdm.values());
    manifest.layers.push_back({layer.name, file});
  }
  write_text_file(dir.file(kRdmManifestName), to_json_text(manifest));
  dir.commit();
  out << "wrote " << manifest.layers.size() << " RDMs (" << manifest.metric << ") to " << dir.path().string()
      << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- rsa

struct RsaArgs {
  Common common;
  std::vector<std::string> model_rdms;
  std::string brain;
  double fdr_q = 0.05;
  std::uint64_t seed = 0;
  std::string permutation = "auto";
  std::uint64_t samples = 10'000;
  bool plot = false;
  bool stamp = false;
  std::string title;
};

std::vector<ModelRdms> load_models(const std::vector<std::string>& paths) {
  std::vector<ModelRdms> models;
  std::set<std::string> ids;
  for (const auto& p : paths) {
    models.push_back(load_model_rdms(p));
    if (!ids.insert(models.back().model_id).second) {
      fail(ErrorCode::DuplicateId, "model id '" + models.back().model_id + "' appears twice");
    }
  }
  return models;
}

json base_config(const RsaArgs& a, const PermutationScheme& scheme) {
  return {{"brain", a.brain}, {"model_rdms", a.model_rdms}, {"fdr_q", a.fdr_q}, {"permutation", permutation_json(scheme)}};
}

void write_report(OutputDir& dir, const ReportSpec& spec) { write_text_file(dir.file("report.svg"), render_report(spec)); }

int cmd_rsa(const RsaArgs& a, std::ostream& out, std::ostream& err) {
  const auto scheme = parse_scheme(a.permutation, a.samples, a.seed);
  OutputDir dir(a.common.out, a.common.force);
  const auto brain = load_rdm_brain(a.brain);
  const auto models = load_models(a.model_rdms);

  RsaConfig config;
  config.fdr_q = a.fdr_q;
  config.permutation = scheme;
  config.workers = a.common.workers;
  const auto results = rsa_evaluate(models, brain, config);
  if (brain.n_subjects() < 2) {
    err << "warning: single subject; standard errors, p-values and noise ceiling are not available\n";
  }

  ResultsDocument doc;
  doc.command = "rsa";
  doc.config = base_config(a, scheme);
  doc.results = results;
  if (brain.n_subjects() >= 2) doc.noise_ceiling = noise_ceiling(brain);
  doc.created = utc_stamp(a.stamp);

  // Best layer per model, in input order.
  std::vector<const EvaluationResult*> best;
  for (const auto& m : models) {
    const EvaluationResult* b = nullptr;
    for (const auto& r : results) {
      if (r.model_id == m.model_id && (!b || r.mean_score > b->mean_score)) b = &r;
    }
    best.push_back(b);
  }
  if (brain.n_subjects() >= 2) {
    std::uint64_t stream = 0;
    for (std::size_t i = 0; i < best.size(); ++i) {
      for (std::size_t j = i + 1; j < best.size(); ++j) {
        PermutationScheme s = scheme;
        s.seed = derive_seed(scheme.seed ^ 0xC0FFEEULL, stream++);
        doc.comparisons.push_back({best[i]->model_id, best[i]->layer_name, best[j]->model_id, best[j]->layer_name,
                                   compare_models(*best[i], *best[j], s)});
      }
    }
  }

  write_text_file(dir.file("results.json"), serialize_results(doc));
  write_text_file(dir.file("results.csv"), results_csv(doc));
  if (a.plot) {
    const std::string title = a.title.empty() ? "RSA: " + brain.roi_name() : a.title;
    write_report(dir, report_from_results(title, results));
  }
  dir.commit();

  out << "model\tbest_layer\tmean_score\tsem\tp_value\tsignificant\n";
  for (const auto* b : best) {
    out << b->model_id << '\t' << b->layer_name << '\t' << fixed(b->mean_score) << '\t'
        << (b->sem ? fixed(*b->sem) : "-") << '\t' << (b->p_value ? fixed(*b->p_value) : "-") << '\t'
        << (b->significant ? "*" : "") << '\n';
  }
  for (const auto& c : doc.comparisons) {
    out << "compare " << c.model_a << "/" << c.layer_a << " vs " << c.model_b << "/" << c.layer_b
        << ": p = " << fixed(c.p_value) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- wrsa

struct WrsaArgs {
  RsaArgs rsa;
  std::size_t folds = 5;
  double nnls_tol = 1e-10;
  std::size_t nnls_max_iter = 10'000;
};

int cmd_wrsa(const WrsaArgs& a, std::ostream& out, std::ostream& err) {
  const auto scheme = parse_scheme(a.rsa.permutation, a.rsa.samples, a.rsa.seed);
  OutputDir dir(a.rsa.common.out, a.rsa.common.force);
  const auto brain = load_rdm_brain(a.rsa.brain);
  const auto models = load_models(a.rsa.model_rdms);

  WrsaConfig config;
  config.n_folds = a.folds;
  config.seed = a.rsa.seed;
  config.nnls_tolerance = a.nnls_tol;
  config.nnls_max_iterations = a.nnls_max_iter;
  config.fdr_q = a.rsa.fdr_q;
  config.permutation = scheme;
  config.workers = a.rsa.common.workers;
  const auto results = wrsa_evaluate(models, brain, config);
  if (brain.n_subjects() < 2) {
    err << "warning: single subject; standard errors, p-values and noise ceiling are not available\n";
  }
  for (const auto& r : results) {
    for (const auto& w : r.warnings) err << "warning: " << r.model_id << ": " << w << '\n';
  }

  ResultsDocument doc;
  doc.command = "wrsa";
  doc.config = base_config(a.rsa, scheme);
  doc.config["folds"] = a.folds;
  doc.config["fold_seed"] = a.rsa.seed;
  doc.config["nnls_tolerance"] = a.nnls_tol;
  doc.config["nnls_max_iterations"] = a.nnls_max_iter;
  doc.wrsa_results = results;
  if (!results.empty()) doc.noise_ceiling = results.front().noise_ceiling;
  doc.created = utc_stamp(a.rsa.stamp);

  write_text_file(dir.file("results.json"), serialize_results(doc));
  write_text_file(dir.file("results.csv"), results_csv(doc));
  write_text_file(dir.file("weights.csv"), weights_csv(results));
  const std::string title = a.rsa.title.empty() ? "Weighted RSA: " + brain.roi_name() : a.rsa.title;
  const auto spec = report_from_results(title, results);
  if (a.rsa.plot) write_report(dir, spec);
  dir.commit();

  out << "model\tmean_score\tsem\tp_value\tsignificant\n";
  for (const auto& r : results) {
    out << r.model_id << '\t' << fixed(r.mean_score) << '\t' << (r.sem ? fixed(*r.sem) : "-") << '\t'
        << (r.p_value ? fixed(*r.p_value) : "-") << '\t' << (r.significant ? "*" : "") << '\n';
  }
  for (const auto& line : spec.notes) out << line << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- searchlight

struct SearchlightArgs {
  Common common;
  std::string brain;
  std::string model_rdm;
  std::string layer;
  double radius = 10.0;
  std::size_t min_voxels = 5;
  std::string metric = "correlation";
  std::size_t top_k = 10;
};

Rdm load_searchlight_model(const SearchlightArgs& a, const VoxelDataset& data) {
  const fs::path p(a.model_rdm);
  if (p.extension() == ".npy") {
    const auto arr = read_npy(p);
    if (arr.shape.size() != 2) fail(ErrorCode::ShapeMismatch, a.model_rdm + ": model RDM must be 2-D");
    if (arr.shape[0] != data.n_conditions()) {
      fail(ErrorCode::ShapeMismatch, a.model_rdm + ": a bare NPY model RDM must match the brain's " +
                                         std::to_string(data.n_conditions()) + " conditions");
    }
    return Rdm::create(data.condition_ids(), repair_rdm_matrix(npy_as_matrix(arr), a.model_rdm));
  }
  const auto model = load_model_rdms(p);
  if (a.layer.empty()) {
    if (model.layers.size() != 1) {
      fail(ErrorCode::InvalidArgument, a.model_rdm + " holds " + std::to_string(model.layers.size()) +
                                           " layers; choose one with --layer");
    }
    return model.layers.front().rdm;
  }
  for (const auto& l : model.layers) {
    if (l.name == a.layer) return l.rdm;
  }
  fail(ErrorCode::InvalidArgument, "layer '" + a.layer + "' not found in " + a.model_rdm);
}

int cmd_searchlight(const SearchlightArgs& a, std::ostream& out, std::ostream&) {
  SearchlightConfig config;
  config.metric = parse_metric(a.metric);
  config.radius_mm = a.radius;
  config.min_voxels = a.min_voxels;
  config.workers = a.common.workers;
  OutputDir dir(a.common.out, a.common.force);

  auto loaded = load_brain_data(a.brain);
  if (!std::holds_alternative<VoxelDataset>(loaded)) {
    fail(ErrorCode::WrongKind, "brain manifest '" + a.brain + "' has kind \"rdm\"; searchlight needs kind \"voxel\"");
  }
  const auto& data = std::get<VoxelDataset>(loaded);
  const Rdm model = load_searchlight_model(a, data);
  const auto map = searchlight_rsa(data, model, config);

  const std::size_t n_vox = data.n_voxels();
  write_npy(dir.file("searchlight_scores.npy"), map.per_subject_scores);
  const std::size_t mean_shape[1] = {n_vox};
  write_npy(dir.file("searchlight_mean.npy"), mean_shape, map.mean_scores);
  write_npy(dir.file("coordinates.npy"), data.coordinates());
  std::vector<double> sizes(map.n_voxels_per_sphere.begin(), map.n_voxels_per_sphere.end());
  write_npy(dir.file("sphere_sizes.npy"), mean_shape, sizes);

  std::vector<std::size_t> order;
  for (std::size_t v = 0; v < n_vox; ++v) {
    if (map.valid(v)) order.push_back(v);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return map.mean_scores[x] > map.mean_scores[y]; });
  json top = json::array();
  for (std::size_t k = 0; k < std::min(a.top_k, order.size()); ++k) {
    const std::size_t v = order[k];
    top.push_back({{"voxel", v},
                   {"coordinate", {data.coordinates()(v, 0), data.coordinates()(v, 1), data.coordinates()(v, 2)}},
                   {"mean_score", map.mean_scores[v]},
                   {"sphere_size", map.n_voxels_per_sphere[v]}});
  }
  const json summary = {{"tool", kToolName},
                        {"version", kToolVersion},
                        {"brain", a.brain},
                        {"model_rdm", a.model_rdm},
                        {"layer", a.layer},
                        {"radius_mm", a.radius},
                        {"min_voxels", a.min_voxels},
                        {"metric", a.metric},
                        {"subjects", map.subjects},
                        {"n_voxels", n_vox},
                        {"valid_centers", map.n_valid()},
                        {"top", top}};
  write_text_file(dir.file("summary.json"), summary.dump(2) + "\n");
  dir.commit();

  out << "valid centers: " << map.n_valid() << " / " << n_vox << '\n';
  if (!order.empty()) {
    const std::size_t v = order.front();
    out << "top center: voxel " << v << " (" << data.coordinates()(v, 0) << ", " << data.coordinates()(v, 1) << ", "
        << data.coordinates()(v, 2) << ") mean score " << fixed(map.mean_scores[v]) << '\n';
  }
  return kExitOk;
}

void add_rsa_options(CLI::App& cmd, RsaArgs& a) {
  add_common(cmd, a.common);
  cmd.add_option("--model-rdms", a.model_rdms, "RDM manifest (or directory) of one model; repeatable")
      ->required();
  cmd.add_option("--brain", a.brain, "Brain manifest (kind rdm)")->required();
  cmd.add_option("--fdr-q", a.fdr_q, "Benjamini-Hochberg level")->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--seed", a.seed, "Seed for permutation sampling and fold assignment");
  cmd.add_option("--permutation", a.permutation, "auto | exact | monte-carlo")
      ->check(CLI::IsMember({"auto", "exact", "monte-carlo"}));
  cmd.add_option("--permutations", a.samples, "Monte-Carlo sign-flip samples");
  cmd.add_flag("--plot", a.plot, "Write report.svg");
  cmd.add_option("--title", a.title, "Report title");
  cmd.add_flag("--stamp", a.stamp, "Record the UTC creation time in results.json");
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"net2rdm: representational similarity analysis of network activations against brain data"};
  app.name("net2rdm");
  app.require_subcommand(1);

  RdmArgs rdm_args;
  auto* rdm = app.add_subcommand("rdm", "Compute one RDM per layer from an activation manifest");
  add_common(*rdm, rdm_args.common);
  rdm->add_option("--activations", rdm_args.activations, "Activation manifest (or directory)")->required();
  rdm->add_option("--metric", rdm_args.metric, "correlation | euclidean | cosine");

  RsaArgs rsa_args;
  auto* rsa = app.add_subcommand("rsa", "Score model RDMs against subject brain RDMs");
  add_rsa_options(*rsa, rsa_args);

  WrsaArgs wrsa_args;
  auto* wrsa = app.add_subcommand("wrsa", "Cross-validated weighted RSA over each model's layers");
  add_rsa_options(*wrsa, wrsa_args.rsa);
  wrsa->add_option("--folds", wrsa_args.folds, "Condition folds")->check(CLI::Range(2, 1'000'000));
  wrsa->add_option("--nnls-tol", wrsa_args.nnls_tol, "KKT tolerance of the NNLS solver")->check(CLI::PositiveNumber);
  wrsa->add_option("--nnls-max-iter", wrsa_args.nnls_max_iter, "NNLS sweep limit");

  SearchlightArgs sl_args;
  auto* sl = app.add_subcommand("searchlight", "Whole-volume searchlight RSA");
  add_common(*sl, sl_args.common);
  sl->add_option("--brain", sl_args.brain, "Brain manifest (kind voxel)")->required();
  sl->add_option("--model-rdm", sl_args.model_rdm, "Model RDM: RDM manifest/directory or a bare .npy")->required();
  sl->add_option("--layer", sl_args.layer, "Layer to use from an RDM manifest");
  sl->add_option("--radius", sl_args.radius, "Sphere radius in mm")->check(CLI::PositiveNumber);
  sl->add_option("--min-voxels", sl_args.min_voxels, "Smallest usable sphere")->check(CLI::Range(2, 1'000'000'000));
  sl->add_option("--metric", sl_args.metric, "correlation | euclidean | cosine");
  sl->add_option("--top-k", sl_args.top_k, "Centers listed in summary.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "E_ARGS: " << msg << '\n';
    return kExitUserError;
  }

  try {
    if (*rdm) {
      rdm_args.common.workers = effective_workers(rdm_args.common.workers);
      set_process_workers(rdm_args.common.workers);
      return cmd_rdm(rdm_args, out, err);
    }
    if (*rsa) {
      rsa_args.common.workers = effective_workers(rsa_args.common.workers);
      set_process_workers(rsa_args.common.workers);
      return cmd_rsa(rsa_args, out, err);
    }
    if (*wrsa) {
      wrsa_args.rsa.common.workers = effective_workers(wrsa_args.rsa.common.workers);
      set_process_workers(wrsa_args.rsa.common.workers);
      return cmd_wrsa(wrsa_args, out, err);
    }
    sl_args.common.workers = effective_workers(sl_args.common.workers);
    set_process_workers(sl_args.common.workers);
    return cmd_searchlight(sl_args, out, err);
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << error_tag(e.code()) << ": " << msg << '\n';
    return kExitUserError;
  } catch (const std::exception& e) {
    err << "E_INTERNAL: " << e.what() << '\n';
    return kExitInternal;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("net2rdm");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data(), out, err);
}

}  // namespace net2rdm::cli
