#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "wsgan/harness.hpp"

using namespace wsgan;
namespace fs = std::filesystem;

namespace {

// Exit codes: 0 success, 1 invariant violation or failed sub-run, 2 bad input.
constexpr int kViolation = 1;
constexpr int kBadInput = 2;

nlohmann::json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(is, nullptr, true, /*ignore_comments=*/true);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return is;
}

fs::path out_path(const std::string& p) { return harness::resolve_output_dir(p); }

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

harness::ExperimentConfig load_experiment(const std::string& path) {
  return path.empty() ? harness::default_benchmark() : harness::experiment_config_from_json(read_json(path));
}

// ---- synth-data ----

struct SynthDataArgs {
  std::string config, out = "dataset.csv";
  std::optional<int> classes;
  std::optional<std::size_t> dim, n;
  std::optional<double> radius, sigma;
  std::optional<std::uint64_t> seed;
};

int synth_data(const SynthDataArgs& a) {
  harness::DatasetSpec s = a.config.empty() ? harness::DatasetSpec{} : harness::dataset_spec_from_json(read_json(a.config));
  if (a.classes) s.classes = *a.classes;
  if (a.dim) s.dim = *a.dim;
  if (a.n) s.n = *a.n;
  if (a.radius) s.radius = *a.radius;
  if (a.sigma) s.sigma = *a.sigma;
  if (a.seed) s.seed = *a.seed;
  const auto d = harness::synth_dataset(s);
  std::ostringstream os;
  harness::write_dataset_csv(os, d);
  const auto path = out_path(a.out);
  harness::write_text(path, os.str());
  harness::write_text(fs::path(path.string() + ".json"), dump(harness::to_json(s)));
  std::cout << "wrote " << d.n << " rows to " << path.string() << "\n";
  return 0;
}

// ---- synth-lfs ----

struct SynthLfArgs {
  std::string data, config, out = "votes.csv";
  int classes = 4;
  std::uint64_t seed = 0;
};

int synth_lfs(const SynthLfArgs& a) {
  auto is = open_in(a.data);
  const auto d = harness::read_dataset_csv(is, a.classes);
  std::vector<ws::LfSpec> specs;
  harness::LfSampling sampling;
  if (!a.config.empty()) {
    const auto j = read_json(a.config);
    if (j.is_array()) {
      for (const auto& s : j) specs.push_back(ws::lf_spec_from_json(s));
    } else {
      sampling = harness::lf_sampling_from_json(j);
    }
  }
  if (specs.empty()) specs = harness::random_lf_specs(d.labels, a.classes, sampling, a.seed);
  const auto L = ws::generate_synthetic_lfs(d.labels, a.classes, specs);
  std::ostringstream os;
  ws::write_label_matrix_csv(os, L);
  const auto path = out_path(a.out);
  harness::write_text(path, os.str());
  harness::write_text(fs::path(path.string() + ".json"), dump(ws::label_matrix_sidecar(L, specs)));

  const auto stats = ws::lf_stats(L, d.labels);
  std::cout << "lf,target_class,target_accuracy,accuracy,target_propensity,coverage\n";
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const auto& r = stats.per_lf[j];
    std::cout << j + 1 << ',' << specs[j].target_class << ',' << specs[j].target_accuracy << ','
              << (r.accuracy ? std::to_string(*r.accuracy) : "") << ',' << specs[j].target_propensity << ','
              << r.coverage << "\n";
  }
  return 0;
}

// ---- fit-labelmodel ----

struct FitArgs {
  std::string votes, truth, model = "mv", out = "posteriors.csv";
  int classes = 4;
};

int fit_labelmodel(const FitArgs& a) {
  auto vs = open_in(a.votes);
  const auto L = ws::read_label_matrix_csv(vs, a.classes);
  ws::PosteriorTable post;
  nlohmann::json info = {{"model", a.model}};
  if (a.model == "mv") {
    post = ws::majority_vote(L);
  } else if (a.model == "ds") {
    const auto fit = ws::dawid_skene_fit(L);
    post = fit.posteriors;
    info["iterations"] = fit.iterations;
    info["converged"] = fit.converged;
    info["accuracies"] = fit.accuracies;
    info["priors"] = fit.priors;
    info["log_likelihood"] = fit.log_likelihood.back();
  } else {
    throw std::invalid_argument("unknown label model '" + a.model + "' (mv or ds)");
  }
  std::ostringstream os;
  ws::write_posteriors_csv(os, post);
  const auto path = out_path(a.out);
  harness::write_text(path, os.str());
  if (!a.truth.empty()) {
    auto ts = open_in(a.truth);
    const auto d = harness::read_dataset_csv(ts, a.classes);
    info["evaluation"] = metrics::to_json(metrics::evaluate_posteriors(a.model, post, d.labels));
  }
  harness::write_text(fs::path(path.string() + ".json"), dump(info));
  std::cout << dump(info);
  return 0;
}

// ---- train ----

struct TrainArgs {
  std::string data, votes, config, mode, out = "train";
  int classes = 4;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
};

int train(const TrainArgs& a) {
  auto ds = open_in(a.data);
  const auto d = harness::read_dataset_csv(ds, a.classes);
  auto vs = open_in(a.votes);
  const auto L = ws::read_label_matrix_csv(vs, a.classes);
  auto cfg = a.config.empty() ? gan::TrainingConfig{} : gan::training_config_from_json(read_json(a.config));
  if (!a.mode.empty()) cfg.mode = gan::parse_mode(a.mode);
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.seed) cfg.seed = *a.seed;
  const auto res = gan::train(d, L, cfg);
  const auto dir = out_path(a.out);
  std::ostringstream hist;
  gan::write_history_csv(hist, res.history);
  harness::write_text(dir / "history.csv", hist.str());
  harness::write_text(dir / "checkpoint.json", dump(gan::checkpoint_json(res.bundle, cfg)));
  if (cfg.mode != gan::Mode::infogan) {
    const auto pl = gan::predict_pseudolabels(res.bundle, d.tensor(), &L);
    std::ostringstream post;
    ws::write_posteriors_csv(post, pl.table);
    harness::write_text(dir / "pseudolabels.csv", post.str());
  }
  if (!res.history.epochs.empty()) {
    const auto& last = res.history.epochs.back();
    std::cout << "epoch " << last.epoch << ": ari " << last.ari << ", pseudolabel accuracy " << last.pl_accuracy
              << "\n";
  }
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}

// ---- benchmark ----

int benchmark(const std::string& config, const std::string& out) {
  auto c = load_experiment(config);
  const auto dir = out_path(out.empty() ? c.output_dir : out);
  const auto res = harness::run_benchmark(c, dir);
  std::cout << harness::summary_csv(res.summary);
  for (const auto& f : res.manifest.failures) std::cerr << "failed: " << f << "\n";
  std::cout << "wrote " << dir.string() << " (config " << res.manifest.config_hash << ")\n";
  return res.manifest.success ? 0 : kViolation;
}

// ---- augment ----

int augment(const std::string& config, const std::string& out, std::optional<std::size_t> n_synth,
            const std::string& mode) {
  auto c = load_experiment(config);
  std::vector<gan::AugmentMode> modes;
  if (mode == "both") {
    modes = {gan::AugmentMode::synthetic_pl, gan::AugmentMode::lf_pl};
  } else {
    modes = {gan::parse_augment_mode(mode)};
  }
  const auto dir = out_path(out.empty() ? c.output_dir : out);
  const auto res = harness::run_augmentation(c, n_synth.value_or(c.augmentation.n_synth), modes, dir);
  std::cout << harness::augmentation_csv(res.rows);
  for (const auto& [m, delta] : res.mean_delta) std::cout << m << " mean delta " << delta << "\n";
  for (const auto& f : res.manifest.failures) std::cerr << "failed: " << f << "\n";
  return res.manifest.success ? 0 : kViolation;
}

// ---- theory ----

int theory_cmd(const std::string& grid, const std::string& out) {
  const auto g = grid.empty() ? harness::TheoryGrid{} : harness::theory_grid_from_json(read_json(grid));
  const auto rep = harness::run_theory_suite(g);
  const auto dir = out_path(out);
  harness::write_text(dir / "theory_report.json", dump(theory::to_json(rep)));
  harness::write_text(dir / "theory_report.txt", theory::to_text(rep));
  std::cout << theory::to_text(rep);
  return rep.passed() ? 0 : kViolation;
}

// ---- report ----

// Recomputes the summary from the per-seed rows and checks it against the
// stored summary before printing it.
int report(const std::string& dir_arg) {
  const auto dir = out_path(dir_arg);
  auto rs = open_in((dir / "benchmark_rows.csv").string());
  const auto rows = harness::read_rows_csv(rs);
  const auto summary = harness::summarize(rows);
  std::ifstream stored(dir / "benchmark_summary.csv", std::ios::binary);
  std::ostringstream stored_text;
  stored_text << stored.rdbuf();
  const bool consistent = stored_text.str() == harness::summary_csv(summary);

  std::cout << "| model | metric | n | mean | std |\n|---|---|---|---|---|\n";
  char buf[64];
  for (const auto& s : summary) {
    std::snprintf(buf, sizeof buf, "%.4f | %.4f", s.mean, s.stdev);
    std::cout << "| " << s.model << " | " << s.metric << " | " << s.count << " | " << buf << " |\n";
  }
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status == "failed";
  if (failed) std::cout << failed << " failed sub-run(s)\n";
  if (!consistent) {
    std::cerr << "benchmark_summary.csv does not match the per-seed rows\n";
    return kViolation;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly supervised GAN toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  SynthDataArgs sd;
  auto* c_sd = app.add_subcommand("synth-data", "sample a Gaussian-mixture dataset");
  c_sd->add_option("--config", sd.config, "dataset spec JSON");
  c_sd->add_option("--classes", sd.classes);
  c_sd->add_option("--dim", sd.dim);
  c_sd->add_option("-n,--n", sd.n);
  c_sd->add_option("--radius", sd.radius);
  c_sd->add_option("--sigma", sd.sigma);
  c_sd->add_option("--seed", sd.seed);
  c_sd->add_option("-o,--out", sd.out, "output CSV");
  c_sd->callback([&] { rc = synth_data(sd); });

  SynthLfArgs sl;
  auto* c_sl = app.add_subcommand("synth-lfs", "generate synthetic labeling functions for a dataset");
  c_sl->add_option("--data", sl.data, "dataset CSV")->required();
  c_sl->add_option("--classes", sl.classes);
  c_sl->add_option("--config", sl.config, "JSON: an LF spec array or LF sampling ranges");
  c_sl->add_option("--seed", sl.seed);
  c_sl->add_option("-o,--out", sl.out, "output label matrix CSV");
  c_sl->callback([&] { rc = synth_lfs(sl); });

  FitArgs fa;
  auto* c_fit = app.add_subcommand("fit-labelmodel", "aggregate LF votes into posteriors");
  c_fit->add_option("--votes", fa.votes, "label matrix CSV")->required();
  c_fit->add_option("--classes", fa.classes);
  c_fit->add_option("--model", fa.model, "mv or ds");
  c_fit->add_option("--truth", fa.truth, "dataset CSV with hidden labels, for evaluation");
  c_fit->add_option("-o,--out", fa.out, "output posteriors CSV");
  c_fit->callback([&] { rc = fit_labelmodel(fa); });

  TrainArgs ta;
  auto* c_train = app.add_subcommand("train", "train InfoGAN or WSGAN on a dataset and its votes");
  c_train->add_option("--data", ta.data, "dataset CSV")->required();
  c_train->add_option("--votes", ta.votes, "label matrix CSV")->required();
  c_train->add_option("--classes", ta.classes);
  c_train->add_option("--config", ta.config, "training config JSON");
  c_train->add_option("--mode", ta.mode, "infogan, vector or encoder");
  c_train->add_option("--epochs", ta.epochs);
  c_train->add_option("--seed", ta.seed);
  c_train->add_option("-o,--out", ta.out, "output directory");
  c_train->callback([&] { rc = train(ta); });

  std::string bench_config, bench_out;
  auto* c_bench = app.add_subcommand("benchmark", "run the label-model and GAN comparison");
  c_bench->add_option("--config", bench_config, "experiment config JSON; default desk benchmark");
  c_bench->add_option("-o,--out", bench_out, "output directory; default from config");
  c_bench->callback([&] { rc = benchmark(bench_config, bench_out); });

  std::string aug_config, aug_out, aug_mode = "both";
  std::optional<std::size_t> aug_n;
  auto* c_aug = app.add_subcommand("augment", "measure end-classifier accuracy with synthetic data");
  c_aug->add_option("--config", aug_config, "experiment config JSON; default desk benchmark");
  c_aug->add_option("--n-synth", aug_n, "synthetic points to append");
  c_aug->add_option("--mode", aug_mode, "synthetic_pl, lf_pl or both");
  c_aug->add_option("-o,--out", aug_out, "output directory; default from config");
  c_aug->callback([&] { rc = augment(aug_config, aug_out, aug_n, aug_mode); });

  std::string grid, theory_out = "theory";
  auto* c_theory = app.add_subcommand("theory", "run the numerical theory checks");
  c_theory->add_option("--grid", grid, "grid JSON; default grid when omitted");
  c_theory->add_option("-o,--out", theory_out, "output directory");
  c_theory->callback([&] { rc = theory_cmd(grid, theory_out); });

  std::string report_dir;
  auto* c_report = app.add_subcommand("report", "summarize a benchmark directory");
  c_report->add_option("dir", report_dir, "benchmark output directory")->required();
  c_report->callback([&] { rc = report(report_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kViolation;
  }
  return rc;
}
