#pragma once

// Experiment orchestration: synthetic Gaussian-mixture datasets, random LF
// sets, benchmark runs over seeds, augmentation runs, and the theory grid.
// Every CSV written here is a pure function of (config, seed); wall-clock
// times go only into the manifest.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wsgan/dataset.hpp"
#include "wsgan/metrics.hpp"
#include "wsgan/model.hpp"
#include "wsgan/rng.hpp"
#include "wsgan/theory.hpp"
#include "wsgan/weaksup.hpp"

namespace wsgan::harness {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutputRootEnv = "WSGAN_OUTPUT_ROOT";
inline constexpr int kCsvSchemaVersion = 1;

// ---- datasets ------------------------------------------------------------------

// Class k sits at angle 2 pi (k - 1) / C on a circle of the given radius in
// the first two coordinates; remaining coordinates are centered at 0.
struct DatasetSpec {
  int classes = 4;
  std::size_t dim = 2;
  std::size_t n = 4000;
  double radius = 4.0;
  double sigma = 0.6;
  std::uint64_t seed = 0;

  void validate() const {
    if (classes < 2) throw std::invalid_argument("DatasetSpec: classes >= 2");
    if (dim < 2) throw std::invalid_argument("DatasetSpec: dim >= 2");
    if (!(sigma > 0.0)) throw std::invalid_argument("DatasetSpec: sigma > 0");
    if (!(radius > 0.0)) throw std::invalid_argument("DatasetSpec: radius > 0");
  }

  std::vector<double> prototypes() const {
    std::vector<double> p(static_cast<std::size_t>(classes) * dim, 0.0);
    for (int k = 0; k < classes; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / classes;
      p[static_cast<std::size_t>(k) * dim] = radius * std::cos(angle);
      p[static_cast<std::size_t>(k) * dim + 1] = radius * std::sin(angle);
    }
    return p;
  }
};

inline nlohmann::json to_json(const DatasetSpec& s) {
  return {{"classes", s.classes}, {"dim", s.dim},   {"n", s.n},
          {"radius", s.radius},   {"sigma", s.sigma}, {"seed", s.seed}};
}

inline DatasetSpec dataset_spec_from_json(const nlohmann::json& j) {
  DatasetSpec s;
  s.classes = j.value("classes", s.classes);
  s.dim = j.value("dim", s.dim);
  s.n = j.value("n", s.n);
  s.radius = j.value("radius", s.radius);
  s.sigma = j.value("sigma", s.sigma);
  s.seed = j.value("seed", s.seed);
  s.validate();
  return s;
}

// Draw order per sample: class id (uniform_int), then dim normals.
inline Dataset synth_dataset(const DatasetSpec& spec) {
  spec.validate();
  const auto protos = spec.prototypes();
  Dataset d;
  d.n = spec.n;
  d.dim = spec.dim;
  d.classes = spec.classes;
  d.features.resize(spec.n * spec.dim);
  d.labels.resize(spec.n);
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const int k = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(spec.classes)));
    d.labels[i] = k + 1;
    for (std::size_t c = 0; c < spec.dim; ++c) {
      d.features[i * spec.dim + c] = protos[static_cast<std::size_t>(k) * spec.dim + c] + spec.sigma * rng.normal();
    }
  }
  return d;
}

// Class id (1-based) of the nearest prototype; ties go to the lowest id.
inline int nearest_prototype(std::span<const double> x, const std::vector<double>& protos, std::size_t dim) {
  const std::size_t classes = protos.size() / dim;
  int best = 1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < classes; ++k) {
    double d = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double diff = x[c] - protos[k * dim + c];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k) + 1;
    }
  }
  return best;
}

inline std::vector<double> class_shares(std::span<const int> labels, int classes) {
  std::vector<double> s(static_cast<std::size_t>(classes), 0.0);
  for (int y : labels) s[static_cast<std::size_t>(y - 1)] += 1.0;
  for (double& v : s) v /= static_cast<double>(labels.size());
  return s;
}

inline void write_dataset_csv(std::ostream& os, const Dataset& d) {
  for (std::size_t c = 0; c < d.dim; ++c) os << "x" << c << ',';
  os << "label\n";
  char buf[32];
  for (std::size_t i = 0; i < d.n; ++i) {
    for (double v : d.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf << ',';
    }
    os << d.labels[i] << '\n';
  }
}

inline Dataset read_dataset_csv(std::istream& is, int classes) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("dataset CSV: missing header");
  const auto dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  Dataset d;
  d.dim = dim;
  d.classes = classes;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::string cell;
    for (std::size_t c = 0; c < dim; ++c) {
      if (!std::getline(rs, cell, ',')) throw std::runtime_error("dataset CSV: short row");
      d.features.push_back(std::stod(cell));
    }
    if (!std::getline(rs, cell, ',')) throw std::runtime_error("dataset CSV: missing label");
    d.labels.push_back(std::stoi(cell));
    ++d.n;
  }
  d.validate();
  return d;
}

// ---- random LF sets ----------------------------------------------------------------

struct LfSampling {
  std::size_t count = 12;
  double accuracy_lo = 0.55;
  double accuracy_hi = 0.9;
  double propensity_lo = 0.1;
  double propensity_hi = 0.3;
};

inline nlohmann::json to_json(const LfSampling& s) {
  return {{"count", s.count},
          {"accuracy_lo", s.accuracy_lo},
          {"accuracy_hi", s.accuracy_hi},
          {"propensity_lo", s.propensity_lo},
          {"propensity_hi", s.propensity_hi}};
}

inline LfSampling lf_sampling_from_json(const nlohmann::json& j) {
  LfSampling s;
  s.count = j.value("count", s.count);
  s.accuracy_lo = j.value("accuracy_lo", s.accuracy_lo);
  s.accuracy_hi = j.value("accuracy_hi", s.accuracy_hi);
  s.propensity_lo = j.value("propensity_lo", s.propensity_lo);
  s.propensity_hi = j.value("propensity_hi", s.propensity_hi);
  return s;
}

// Feasible iff the rounded vote counts fit the available positives/negatives.
inline bool lf_feasible(const ws::LfSpec& spec, std::span<const int> truth) {
  const std::size_t n = truth.size();
  const auto positives = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), spec.target_class));
  const auto votes = static_cast<std::size_t>(std::llround(spec.target_propensity * n));
  const auto hits = static_cast<std::size_t>(std::llround(spec.target_accuracy * votes));
  return hits <= positives && votes - hits <= n - positives;
}

// Per LF: target class (uniform), accuracy, propensity, LF seed. An
// infeasible propensity is redrawn from the same range, then shrunk.
inline std::vector<ws::LfSpec> random_lf_specs(std::span<const int> truth, int classes, const LfSampling& s,
                                               std::uint64_t seed) {
  if (!(s.accuracy_lo > 1.0 / classes && s.accuracy_lo <= s.accuracy_hi && s.accuracy_hi <= 1.0)) {
    throw std::invalid_argument("LfSampling: accuracy range must lie in (1/C, 1]");
  }
  if (!(s.propensity_lo > 0.0 && s.propensity_lo <= s.propensity_hi && s.propensity_hi <= 1.0)) {
    throw std::invalid_argument("LfSampling: propensity range must lie in (0, 1]");
  }
  Rng rng(seed);
  std::vector<ws::LfSpec> specs;
  for (std::size_t j = 0; j < s.count; ++j) {
    ws::LfSpec spec;
    spec.target_class = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(classes))) + 1;
    spec.target_accuracy = rng.uniform(s.accuracy_lo, s.accuracy_hi);
    spec.target_propensity = rng.uniform(s.propensity_lo, s.propensity_hi);
    spec.seed = rng.split();
    for (int attempt = 0; attempt < 100 && !lf_feasible(spec, truth); ++attempt) {
      spec.target_propensity = rng.uniform(s.propensity_lo, s.propensity_hi);
    }
    while (!lf_feasible(spec, truth) && spec.target_propensity > 1e-3) spec.target_propensity *= 0.95;
    if (!lf_feasible(spec, truth)) {
      throw ws::InfeasibleLfSpec("random_lf_specs: no feasible propensity for class " +
                                 std::to_string(spec.target_class));
    }
    specs.push_back(spec);
  }
  return specs;
}

// Re-applies synthetic LFs to new points: each point takes the class of its
// nearest prototype, then LF j votes with probability min(1, a p / pi_t) when
// that class is its target t and min(1, (1 - a) p / (1 - pi_t)) otherwise,
// which reproduces the LF's accuracy a and propensity p in expectation.
class PrototypeLfApplicator {
 public:
  PrototypeLfApplicator(const DatasetSpec& spec, std::vector<ws::LfSpec> lfs, std::vector<double> shares,
                        std::uint64_t seed)
      : dim_(spec.dim), classes_(spec.classes), protos_(spec.prototypes()), lfs_(std::move(lfs)),
        shares_(std::move(shares)), rng_(seed) {}

  ws::LabelMatrix operator()(std::span<const double> features, std::size_t n) {
    const std::size_t m = lfs_.size();
    std::vector<int> votes(n * m, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int k = nearest_prototype(features.subspan(i * dim_, dim_), protos_, dim_);
      for (std::size_t j = 0; j < m; ++j) {
        const auto& lf = lfs_[j];
        const double pi = shares_[static_cast<std::size_t>(lf.target_class - 1)];
        const double p = k == lf.target_class
                             ? lf.target_accuracy * lf.target_propensity / pi
                             : (1.0 - lf.target_accuracy) * lf.target_propensity / (1.0 - pi);
        if (rng_.bernoulli(std::min(1.0, p))) votes[i * m + j] = lf.target_class;
      }
    }
    return ws::LabelMatrix(n, m, classes_, std::move(votes));
  }

 private:
  std::size_t dim_;
  int classes_;
  std::vector<double> protos_;
  std::vector<ws::LfSpec> lfs_;
  std::vector<double> shares_;
  Rng rng_;
};

// ---- experiment config ---------------------------------------------------------

struct AugmentationSettings {
  std::size_t n_synth = 1000;
  std::size_t n_test = 2000;
  metrics::ClassifierConfig classifier;
  double balance_tolerance = 5.0;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  LfSampling lf_sampling;
  std::vector<ws::LfSpec> lfs;  // explicit LF list; overrides lf_sampling when non-empty
  gan::TrainingConfig training;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  std::vector<std::string> models = {"mv", "ds", "infogan", "wsgan_vector", "wsgan_encoder"};
  std::vector<std::string> metrics = {"accuracy", "weighted_f1", "weighted_map", "ari", "frechet"};
  AugmentationSettings augmentation;
  std::string output_dir = "benchmark";

  void validate() const {
    dataset.validate();
    training.validate();
    if (seeds.empty()) throw std::invalid_argument("ExperimentConfig: at least one seed");
    for (const auto& s : lfs) s.validate(dataset.classes);
    static const std::vector<std::string> known_models = {"mv", "ds", "infogan", "wsgan_vector", "wsgan_encoder"};
    for (const auto& m : models) {
      if (std::find(known_models.begin(), known_models.end(), m) == known_models.end()) {
        throw std::invalid_argument("ExperimentConfig: unknown model '" + m + "'");
      }
    }
    static const std::vector<std::string> known_metrics = {"accuracy", "weighted_f1", "weighted_map", "ari",
                                                           "frechet"};
    for (const auto& m : metrics) {
      if (std::find(known_metrics.begin(), known_metrics.end(), m) == known_metrics.end()) {
        throw std::invalid_argument("ExperimentConfig: unknown metric '" + m + "'");
      }
    }
  }
};

// The default desk benchmark: C=4, d=2, n=4000, 12 LFs with accuracy
// U[0.55, 0.9] and propensity U[0.1, 0.3], 60 epochs, seeds {0, 1, 2}.
inline ExperimentConfig default_benchmark() {
  ExperimentConfig c;
  c.training.epochs = 60;
  return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json lfs = nlohmann::json::array();
  for (const auto& s : c.lfs) lfs.push_back(ws::to_json(s));
  const auto& a = c.augmentation;
  return {{"dataset", to_json(c.dataset)},
          {"lf_sampling", to_json(c.lf_sampling)},
          {"lfs", lfs},
          {"training", gan::to_json(c.training)},
          {"seeds", c.seeds},
          {"models", c.models},
          {"metrics", c.metrics},
          {"augmentation",
           {{"n_synth", a.n_synth},
            {"n_test", a.n_test},
            {"balance_tolerance", a.balance_tolerance},
            {"classifier",
             {{"hidden", a.classifier.hidden},
              {"epochs", a.classifier.epochs},
              {"batch", a.classifier.batch},
              {"lr", a.classifier.lr},
              {"seed", a.classifier.seed}}}}},
          {"output_dir", c.output_dir}};
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("dataset")) c.dataset = dataset_spec_from_json(j.at("dataset"));
  if (j.contains("lf_sampling")) c.lf_sampling = lf_sampling_from_json(j.at("lf_sampling"));
  if (j.contains("lfs")) {
    for (const auto& s : j.at("lfs")) c.lfs.push_back(ws::lf_spec_from_json(s));
  }
  if (j.contains("training")) c.training = gan::training_config_from_json(j.at("training"));
  c.seeds = j.value("seeds", c.seeds);
  c.models = j.value("models", c.models);
  c.metrics = j.value("metrics", c.metrics);
  if (j.contains("augmentation")) {
    const auto& a = j.at("augmentation");
    auto& dst = c.augmentation;
    dst.n_synth = a.value("n_synth", dst.n_synth);
    dst.n_test = a.value("n_test", dst.n_test);
    dst.balance_tolerance = a.value("balance_tolerance", dst.balance_tolerance);
    if (a.contains("classifier")) {
      const auto& k = a.at("classifier");
      dst.classifier.hidden = k.value("hidden", dst.classifier.hidden);
      dst.classifier.epochs = k.value("epochs", dst.classifier.epochs);
      dst.classifier.batch = k.value("batch", dst.classifier.batch);
      dst.classifier.lr = k.value("lr", dst.classifier.lr);
      dst.classifier.seed = k.value("seed", dst.classifier.seed);
    }
  }
  c.output_dir = j.value("output_dir", c.output_dir);
  c.validate();
  return c;
}

// FNV-1a over the canonical (key-sorted, compact) JSON dump.
inline std::string config_hash(const ExperimentConfig& c) {
  const std::string s = to_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Relative output paths are resolved against $WSGAN_OUTPUT_ROOT when set.
inline fs::path resolve_output_dir(const std::string& dir) {
  fs::path p(dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) p = fs::path(root) / p;
  }
  return p;
}

// ---- per-seed inputs -------------------------------------------------------------

struct SeedInputs {
  Dataset data;
  std::vector<ws::LfSpec> lfs;
  ws::LabelMatrix votes;
  std::uint64_t train_seed = 0;
  std::uint64_t aux_seed = 0;
};

// From Rng(seed): dataset seed, LF-set seed, training seed, auxiliary seed.
inline SeedInputs make_seed_inputs(const ExperimentConfig& c, std::uint64_t seed) {
  Rng rng(seed);
  SeedInputs s;
  DatasetSpec ds = c.dataset;
  ds.seed = rng.split();
  const std::uint64_t lf_seed = rng.split();
  s.train_seed = rng.split();
  s.aux_seed = rng.split();
  s.data = synth_dataset(ds);
  s.lfs = c.lfs.empty() ? random_lf_specs(s.data.labels, ds.classes, c.lf_sampling, lf_seed) : c.lfs;
  s.votes = ws::generate_synthetic_lfs(s.data.labels, ds.classes, s.lfs);
  return s;
}

// ---- CSV helpers -------------------------------------------------------------------

inline std::string fmt_num(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

inline void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
}

// ---- benchmark ---------------------------------------------------------------------

struct BenchmarkRow {
  std::uint64_t seed = 0;
  std::string model;
  std::string status = "ok";
  std::optional<double> accuracy;
  std::optional<double> weighted_f1;
  std::optional<double> weighted_map;
  std::optional<double> ari;
  std::optional<double> covered_fraction;
  std::optional<double> frechet;
};

struct SummaryRow {
  std::string model;
  std::string metric;
  std::size_t count = 0;
  double mean = 0.0;
  double stdev = 0.0;  // sample standard deviation; 0 for a single seed
};

struct RunManifest {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::vector<std::string> files;
  std::vector<std::string> failures;
  std::map<std::string, double> wall_seconds;
  bool success = true;
};

inline nlohmann::json to_json(const RunManifest& m) {
  return {{"config_hash", m.config_hash},   {"tool_version", m.tool_version},
          {"files", m.files},               {"failures", m.failures},
          {"wall_seconds", m.wall_seconds}, {"success", m.success}};
}

inline const std::vector<std::string>& benchmark_columns() {
  static const std::vector<std::string> cols = {"accuracy",         "weighted_f1", "weighted_map", "ari",
                                                "covered_fraction", "frechet"};
  return cols;
}

inline std::optional<double> row_value(const BenchmarkRow& r, const std::string& col) {
  if (col == "accuracy") return r.accuracy;
  if (col == "weighted_f1") return r.weighted_f1;
  if (col == "weighted_map") return r.weighted_map;
  if (col == "ari") return r.ari;
  if (col == "covered_fraction") return r.covered_fraction;
  if (col == "frechet") return r.frechet;
  throw std::invalid_argument("unknown column " + col);
}

inline std::string rows_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream os;
  os << "seed,model,status";
  for (const auto& c : benchmark_columns()) os << ',' << c;
  os << '\n';
  for (const auto& r : rows) {
    os << r.seed << ',' << r.model << ',' << r.status;
    for (const auto& c : benchmark_columns()) os << ',' << fmt_num(row_value(r, c));
    os << '\n';
  }
  return os.str();
}

inline std::vector<BenchmarkRow> read_rows_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("rows CSV: missing header");
  std::string expected = "seed,model,status";
  for (const auto& c : benchmark_columns()) expected += "," + c;
  if (line != expected) throw std::runtime_error("rows CSV: unexpected header '" + line + "'");
  std::vector<BenchmarkRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream rs(line);
    while (std::getline(rs, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 3 + benchmark_columns().size()) throw std::runtime_error("rows CSV: bad row '" + line + "'");
    BenchmarkRow r;
    r.seed = std::stoull(cells[0]);
    r.model = cells[1];
    r.status = cells[2];
    std::optional<double>* slots[] = {&r.accuracy, &r.weighted_f1, &r.weighted_map,
                                      &r.ari,      &r.covered_fraction, &r.frechet};
    for (std::size_t k = 0; k < benchmark_columns().size(); ++k) {
      if (!cells[3 + k].empty()) *slots[k] = std::stod(cells[3 + k]);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

// Mean and sample standard deviation per (model, metric) over the rows that
// carry a value, in first-appearance model order.
inline std::vector<SummaryRow> summarize(const std::vector<BenchmarkRow>& rows) {
  std::vector<std::string> models;
  for (const auto& r : rows) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
  }
  std::vector<SummaryRow> out;
  for (const auto& model : models) {
    for (const auto& col : benchmark_columns()) {
      std::vector<double> v;
      for (const auto& r : rows) {
        if (r.model != model) continue;
        const auto x = row_value(r, col);
        if (x && std::isfinite(*x)) v.push_back(*x);
      }
      if (v.empty()) continue;
      SummaryRow s{model, col, v.size(), 0.0, 0.0};
      for (double x : v) s.mean += x;
      s.mean /= static_cast<double>(v.size());
      if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stdev = std::sqrt(ss / static_cast<double>(v.size() - 1));
      }
      out.push_back(s);
    }
  }
  return out;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "model,metric,count,mean,std\n";
  for (const auto& s : rows) {
    os << s.model << ',' << s.metric << ',' << s.count << ',' << fmt_num(s.mean) << ',' << fmt_num(s.stdev) << '\n';
  }
  return os.str();
}

struct BenchmarkResult {
  RunManifest manifest;
  std::vector<BenchmarkRow> rows;
  std::vector<SummaryRow> summary;
};

namespace detail {

inline bool wants(const std::vector<std::string>& list, const std::string& name) {
  return std::find(list.begin(), list.end(), name) != list.end();
}

inline BenchmarkRow label_model_row(std::uint64_t seed, const std::string& model, const ws::PosteriorTable& post,
                                    std::span<const int> truth) {
  const auto ev = metrics::evaluate_posteriors(model, post, truth);
  BenchmarkRow r;
  r.seed = seed;
  r.model = model;
  r.accuracy = ev.accuracy;
  r.weighted_f1 = ev.weighted_f1;
  r.weighted_map = ev.weighted_map;
  r.covered_fraction = ev.covered_fraction;
  return r;
}

// Drops the columns not selected in config.metrics.
inline void apply_metric_selection(BenchmarkRow& r, const std::vector<std::string>& selected) {
  if (!wants(selected, "accuracy")) r.accuracy.reset();
  if (!wants(selected, "weighted_f1")) r.weighted_f1.reset();
  if (!wants(selected, "weighted_map")) r.weighted_map.reset();
  if (!wants(selected, "ari")) r.ari.reset();
  if (!wants(selected, "frechet")) r.frechet.reset();
}

}  // namespace detail

// Frechet distance between the real features and n generated samples.
inline double sample_frechet(const gan::ModelBundle& b, const Dataset& data, std::uint64_t seed) {
  const auto s = gan::generate_samples(b, data.n, gan::CodeSpec{}, seed);
  return metrics::frechet_gaussian_distance(data.features, data.n, s.features, s.n, data.dim).distance;
}

// Per seed: MV, Dawid-Skene, and the three GAN modes. GAN rows carry the
// final ARI of Q and the Frechet distance of generated samples; the InfoGAN
// row has no label model and leaves the pseudolabel columns empty. Writes
// benchmark_rows.csv, benchmark_summary.csv, per-seed training histories and
// manifest.json under out_dir.
inline BenchmarkResult run_benchmark(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  BenchmarkResult res;
  res.manifest.config_hash = config_hash(config);
  auto record_file = [&](const fs::path& p, const std::string& content) {
    write_text(p, content);
    res.manifest.files.push_back(fs::relative(p, out_dir).generic_string());
  };
  using clock = std::chrono::steady_clock;

  for (std::uint64_t seed : config.seeds) {
    const fs::path seed_dir = out_dir / ("seed_" + std::to_string(seed));
    SeedInputs in;
    try {
      in = make_seed_inputs(config, seed);
    } catch (const std::exception& e) {
      res.manifest.failures.push_back("seed " + std::to_string(seed) + " inputs: " + e.what());
      continue;
    }
    const auto& truth = in.data.labels;
    for (const auto& model : config.models) {
      const auto t0 = clock::now();
      BenchmarkRow row;
      try {
        if (model == "mv") {
          row = detail::label_model_row(seed, model, ws::majority_vote(in.votes), truth);
        } else if (model == "ds") {
          const auto fit = ws::dawid_skene_fit(in.votes);
          row = detail::label_model_row(seed, model, fit.posteriors, truth);
          if (!fit.converged) row.status = "not_converged";
        } else {
          auto cfg = config.training;
          cfg.seed = in.train_seed;
          cfg.mode = model == "infogan" ? gan::Mode::infogan
                                        : (model == "wsgan_vector" ? gan::Mode::vector : gan::Mode::encoder);
          const auto trained = gan::train(in.data, in.votes, cfg);
          std::ostringstream hist;
          gan::write_history_csv(hist, trained.history);
          record_file(seed_dir / ("history_" + model + ".csv"), hist.str());
          if (cfg.mode == gan::Mode::infogan) {
            row.seed = seed;
            row.model = model;
          } else {
            const auto pl = gan::predict_pseudolabels(trained.bundle, in.data.tensor(), &in.votes);
            row = detail::label_model_row(seed, model, pl.table, truth);
          }
          row.ari = metrics::adjusted_rand_index(gan::predict_codes(trained.bundle, in.data.tensor()), truth);
          row.frechet = sample_frechet(trained.bundle, in.data, in.aux_seed);
        }
      } catch (const std::exception& e) {
        row = BenchmarkRow{};
        row.seed = seed;
        row.model = model;
        row.status = "failed";
        res.manifest.failures.push_back("seed " + std::to_string(seed) + " " + model + ": " + e.what());
      }
      detail::apply_metric_selection(row, config.metrics);
      res.rows.push_back(row);
      res.manifest.wall_seconds["seed_" + std::to_string(seed) + "/" + model] =
          std::chrono::duration<double>(clock::now() - t0).count();
    }
  }
  res.summary = summarize(res.rows);
  record_file(out_dir / "benchmark_rows.csv", rows_csv(res.rows));
  record_file(out_dir / "benchmark_summary.csv", summary_csv(res.summary));
  record_file(out_dir / "config.json", to_json(config).dump(2) + "\n");
  res.manifest.success = res.manifest.failures.empty();
  write_text(out_dir / "manifest.json", to_json(res.manifest).dump(2) + "\n");
  return res;
}

// ---- augmentation ---------------------------------------------------------------------

struct AugmentationRow {
  std::uint64_t seed = 0;
  std::string mode;
  std::string status = "ok";
  double base_accuracy = 0.0;
  double augmented_accuracy = 0.0;
  double delta = 0.0;
  std::size_t appended = 0;
  double balance_ratio = 0.0;
};

inline std::string augmentation_csv(const std::vector<AugmentationRow>& rows) {
  std::ostringstream os;
  os << "seed,mode,status,base_accuracy,augmented_accuracy,delta,appended,balance_ratio\n";
  for (const auto& r : rows) {
    os << r.seed << ',' << r.mode << ',' << r.status << ',' << fmt_num(r.base_accuracy) << ','
       << fmt_num(r.augmented_accuracy) << ',' << fmt_num(r.delta) << ',' << r.appended << ','
       << fmt_num(r.balance_ratio) << '\n';
  }
  return os.str();
}

struct AugmentationResult {
  std::vector<AugmentationRow> rows;
  RunManifest manifest;
  std::map<std::string, double> mean_delta;  // per mode, over seeds that completed
};

// Per seed: trains WSGAN-Encoder once on the seed's data and LFs, builds the
// pseudolabelled real training set (covered rows, crisp label-model labels),
// then for each mode trains the end classifier with and without n_synth
// generated points and reports the test-accuracy delta on a fresh test draw.
inline AugmentationResult run_augmentation(const ExperimentConfig& config, std::size_t n_synth,
                                           const std::vector<gan::AugmentMode>& modes, const fs::path& out_dir) {
  config.validate();
  AugmentationResult res;
  res.manifest.config_hash = config_hash(config);
  std::map<std::string, std::size_t> counted;
  for (std::uint64_t seed : config.seeds) {
    std::vector<AugmentationRow> seed_rows;
    for (auto mode : modes) {
      AugmentationRow row;
      row.seed = seed;
      row.mode = gan::to_string(mode);
      seed_rows.push_back(row);
    }
    try {
      const auto in = make_seed_inputs(config, seed);
      Rng aux(in.aux_seed);
      DatasetSpec test_spec = config.dataset;
      test_spec.n = config.augmentation.n_test;
      test_spec.seed = aux.split();
      const auto test = synth_dataset(test_spec);
      const std::uint64_t synth_seed = aux.split();
      const std::uint64_t applicator_seed = aux.split();

      auto cfg = config.training;
      cfg.seed = in.train_seed;
      cfg.mode = gan::Mode::encoder;
      const auto trained = gan::train(in.data, in.votes, cfg);

      const auto pl = gan::predict_pseudolabels(trained.bundle, in.data.tensor(), &in.votes);
      Dataset base;
      base.dim = in.data.dim;
      base.classes = in.data.classes;
      for (std::size_t i = 0; i < in.data.n; ++i) {
        if (!pl.table.covered[i]) continue;
        const auto r = in.data.row(i);
        base.features.insert(base.features.end(), r.begin(), r.end());
        base.labels.push_back(pl.table.crisp(i));
        ++base.n;
      }
      const auto& clf = config.augmentation.classifier;
      const double base_accuracy = metrics::train_eval_classifier(base, test, clf).test_accuracy;

      for (std::size_t k = 0; k < modes.size(); ++k) {
        auto& row = seed_rows[k];
        row.base_accuracy = base_accuracy;
        gan::LfApplicator applicator;
        if (modes[k] == gan::AugmentMode::lf_pl) {
          auto app = std::make_shared<PrototypeLfApplicator>(
              config.dataset, in.lfs, class_shares(in.data.labels, in.data.classes), applicator_seed);
          applicator = [app](std::span<const double> f, std::size_t n) { return (*app)(f, n); };
        }
        const auto aug = gan::augment_dataset(trained.bundle, base, n_synth, modes[k], applicator, synth_seed,
                                              config.augmentation.balance_tolerance);
        row.appended = aug.appended;
        row.balance_ratio = aug.balance.ratio;
        if (!aug.accepted) {
          row.status = "augmentation skipped";
          row.augmented_accuracy = base_accuracy;
        } else if (aug.appended == 0) {
          row.augmented_accuracy = base_accuracy;
        } else {
          row.augmented_accuracy = metrics::train_eval_classifier(aug.data, test, clf).test_accuracy;
        }
        row.delta = row.augmented_accuracy - row.base_accuracy;
        res.mean_delta[row.mode] += row.delta;
        ++counted[row.mode];
      }
    } catch (const std::exception& e) {
      for (auto& row : seed_rows) row.status = "failed";
      res.manifest.failures.push_back("seed " + std::to_string(seed) + ": " + e.what());
    }
    res.rows.insert(res.rows.end(), seed_rows.begin(), seed_rows.end());
  }
  for (auto& [mode, total] : res.mean_delta) total /= static_cast<double>(counted[mode]);
  const auto csv_path = out_dir / "augmentation.csv";
  write_text(csv_path, augmentation_csv(res.rows));
  res.manifest.files.push_back(csv_path.filename().string());
  res.manifest.success = res.manifest.failures.empty();
  write_text(out_dir / "manifest_augmentation.json", to_json(res.manifest).dump(2) + "\n");
  return res;
}

// ---- theory grid ------------------------------------------------------------------------

struct TheoryGrid {
  std::vector<int> m = {3, 7, 15};
  std::vector<double> alpha = {0.1, 0.2, 0.3};
  std::vector<double> eps = {0.1, 0.2, 0.3, 0.4};
  std::int64_t mc_trials = 100000;
  std::size_t chain_pairs = 200;
  std::size_t max_support = 32;
  std::size_t hellinger_pairs = 1000;
  std::uint64_t seed = 0;
};

inline TheoryGrid theory_grid_from_json(const nlohmann::json& j) {
  TheoryGrid g;
  g.m = j.value("m", g.m);
  g.alpha = j.value("alpha", g.alpha);
  g.eps = j.value("eps", g.eps);
  g.mc_trials = j.value("mc_trials", g.mc_trials);
  g.chain_pairs = j.value("chain_pairs", g.chain_pairs);
  g.max_support = j.value("max_support", g.max_support);
  g.hellinger_pairs = j.value("hellinger_pairs", g.hellinger_pairs);
  g.seed = j.value("seed", g.seed);
  return g;
}

// Runs the majority-vote checks over m x alpha, min_lfs at every eps, the
// TV chain for every eps (plain channel and MV channel with eps as the LF
// error rate at every m), and the Hellinger/TV readings. Inputs outside the
// admissible ranges are listed as rejected and skipped. An empty grid
// produces an empty, passing report.
inline theory::TheoryReport run_theory_suite(const TheoryGrid& g) {
  theory::TheoryReport rep;
  if (g.m.empty() && g.alpha.empty() && g.eps.empty()) return rep;
  Rng rng(g.seed);
  for (int m : g.m) {
    for (double a : g.alpha) {
      if (m < 1 || !(a > 0.0 && a <= 0.5)) {
        rep.rejected_inputs.push_back(theory::fmt_params({{"m", m}, {"alpha", a}}));
        continue;
      }
      rep.merge(theory::check_mv_bound(m, a, g.mc_trials, rng.split()));
    }
  }
  std::vector<double> admissible;
  for (double e : g.eps) {
    if (!(e > 0.0 && e < 0.49)) {
      rep.rejected_inputs.push_back(theory::fmt_params({{"eps", e}}) + ": eps must lie in (0, 0.49)");
      continue;
    }
    admissible.push_back(e);
    rep.merge(theory::check_min_lfs(e));
  }
  if (!admissible.empty() && g.chain_pairs > 0) {
    for (double e : admissible) {
      std::size_t violations = 0;
      nlohmann::json first;
      for (std::size_t t = 0; t < g.chain_pairs; ++t) {
        const std::size_t support = 1 + static_cast<std::size_t>(rng.uniform_int(g.max_support));
        const auto P = theory::random_joint(support, rng);
        const auto Q = theory::random_joint(support, rng);
        auto tally = [&](const theory::ChainEntry& c) {
          if (!c.holds) {
            if (!violations) first = c.instance;
            ++violations;
          }
        };
        tally(theory::verify_rcgan_tv_chain(P, Q, e));
        for (int m : g.m) {
          if (m >= 1) tally(theory::verify_rcgan_tv_chain(P, Q, e, theory::MvSetting{m, e}));
        }
      }
      rep.add({"rcgan_tv_chain", theory::fmt_params({{"eps", e}, {"pairs", static_cast<double>(g.chain_pairs)}}),
               static_cast<double>(violations), 0.0, violations == 0, violations ? first.dump() : ""});
    }
  }
  if (g.hellinger_pairs > 0) {
    rep.merge(theory::to_report(theory::evaluate_hellinger_readings(g.hellinger_pairs, g.max_support, rng.split())));
  }
  return rep;
}

}  // namespace wsgan::harness
