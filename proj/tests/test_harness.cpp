#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "wsgan/harness.hpp"

using namespace wsgan;
using namespace wsgan::harness;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            ("wsgan_" + std::string(info->test_suite_name()) + "_" + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

ExperimentConfig smoke_config() {
  auto c = default_benchmark();
  c.dataset.n = 500;
  c.training.epochs = 5;
  c.training.hidden = 16;
  c.training.z_dim = 4;
  c.seeds = {0};
  return c;
}

double prototype_accuracy(const Dataset& d, const DatasetSpec& spec) {
  const auto protos = spec.prototypes();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.n; ++i) hits += nearest_prototype(d.row(i), protos, d.dim) == d.labels[i];
  return static_cast<double>(hits) / static_cast<double>(d.n);
}

}  // namespace

// ---- datasets ----

TEST(SynthDataset, NearestPrototypeAccuracyOnDefaultMixture) {
  DatasetSpec s;
  s.seed = 11;
  const auto d = synth_dataset(s);
  ASSERT_EQ(d.n, 4000u);
  EXPECT_GE(prototype_accuracy(d, s), 0.99);
}

TEST(SynthDataset, TinySigmaPutsPointsOnPrototypes) {
  DatasetSpec s;
  s.sigma = 1e-9;
  s.n = 300;
  s.dim = 3;
  const auto d = synth_dataset(s);
  const auto protos = s.prototypes();
  for (std::size_t i = 0; i < d.n; ++i) {
    for (std::size_t c = 0; c < d.dim; ++c) {
      EXPECT_NEAR(d.row(i)[c], protos[static_cast<std::size_t>(d.labels[i] - 1) * d.dim + c], 1e-7);
    }
  }
  EXPECT_EQ(prototype_accuracy(d, s), 1.0);
}

TEST(SynthDataset, SameSeedSameData) {
  DatasetSpec s;
  s.seed = 5;
  const auto a = synth_dataset(s);
  const auto b = synth_dataset(s);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  s.seed = 6;
  EXPECT_NE(synth_dataset(s).features, a.features);
}

TEST(SynthDataset, PrototypesDistinctAndOnCircle) {
  DatasetSpec s;
  s.classes = 7;
  s.dim = 4;
  const auto p = s.prototypes();
  for (int k = 0; k < 7; ++k) {
    const double* v = &p[static_cast<std::size_t>(k) * 4];
    EXPECT_NEAR(std::hypot(v[0], v[1]), s.radius, 1e-12);
    EXPECT_EQ(v[2], 0.0);
    for (int j = 0; j < k; ++j) {
      const double* w = &p[static_cast<std::size_t>(j) * 4];
      EXPECT_GT(std::hypot(v[0] - w[0], v[1] - w[1]), 1e-6);
    }
  }
}

TEST(SynthDataset, RejectsBadSpecs) {
  DatasetSpec s;
  s.classes = 1;
  EXPECT_THROW(synth_dataset(s), std::invalid_argument);
  s = DatasetSpec{};
  s.sigma = 0.0;
  EXPECT_THROW(synth_dataset(s), std::invalid_argument);
  s = DatasetSpec{};
  s.dim = 1;
  EXPECT_THROW(synth_dataset(s), std::invalid_argument);
}

TEST(DatasetCsv, RoundTripIsExact) {
  DatasetSpec s;
  s.n = 50;
  s.dim = 3;
  const auto d = synth_dataset(s);
  std::stringstream ss;
  write_dataset_csv(ss, d);
  const auto back = read_dataset_csv(ss, s.classes);
  EXPECT_EQ(back.n, d.n);
  EXPECT_EQ(back.dim, d.dim);
  EXPECT_EQ(back.features, d.features);
  EXPECT_EQ(back.labels, d.labels);
}

TEST(DatasetCsv, RejectsOutOfRangeLabel) {
  std::stringstream ss("x0,x1,label\n0.5,1.5,9\n");
  EXPECT_THROW(read_dataset_csv(ss, 4), std::invalid_argument);
  std::stringstream shorter("x0,x1,label\n0.5\n");
  EXPECT_THROW(read_dataset_csv(shorter, 4), std::runtime_error);
}

// ---- LF sampling ----

TEST(LfSampling, SpecsAreFeasibleAndInRange) {
  DatasetSpec s;
  const auto d = synth_dataset(s);
  const auto specs = random_lf_specs(d.labels, s.classes, LfSampling{}, 9);
  ASSERT_EQ(specs.size(), 12u);
  for (const auto& lf : specs) {
    EXPECT_TRUE(lf_feasible(lf, d.labels));
    EXPECT_GE(lf.target_accuracy, 0.55);
    EXPECT_LE(lf.target_accuracy, 0.9);
    EXPECT_GT(lf.target_propensity, 0.0);
    EXPECT_LE(lf.target_propensity, 0.3);
    EXPECT_NO_THROW(lf.validate(s.classes));
  }
  const auto votes = ws::generate_synthetic_lfs(d.labels, s.classes, specs);
  const auto stats = ws::lf_stats(votes, d.labels);
  for (std::size_t j = 0; j < specs.size(); ++j) {
    EXPECT_NEAR(stats.per_lf[j].coverage, specs[j].target_propensity, 0.02);
    ASSERT_TRUE(stats.per_lf[j].accuracy.has_value());
    EXPECT_NEAR(*stats.per_lf[j].accuracy, specs[j].target_accuracy, 0.02);
  }
}

TEST(LfSampling, FeasibilityMatchesCounting) {
  const std::vector<int> truth = {1, 1, 2, 2, 2, 2, 2, 2, 2, 2};
  // 10 votes with 9 hits would need 9 rows of class 1.
  EXPECT_FALSE(lf_feasible({1, 0.9, 1.0, 0}, truth));
  EXPECT_TRUE(lf_feasible({1, 0.5, 0.4, 0}, truth));
  EXPECT_TRUE(lf_feasible({2, 0.8, 1.0, 0}, truth));
}

TEST(LfSampling, RejectsBadRanges) {
  const std::vector<int> truth = {1, 2, 3, 4};
  LfSampling s;
  s.accuracy_lo = 0.2;
  EXPECT_THROW(random_lf_specs(truth, 4, s, 0), std::invalid_argument);
  s = LfSampling{};
  s.propensity_lo = 0.0;
  EXPECT_THROW(random_lf_specs(truth, 4, s, 0), std::invalid_argument);
}

TEST(PrototypeLfApplicator, ReproducesAccuracyAndPropensityInExpectation) {
  DatasetSpec s;
  s.n = 20000;
  s.sigma = 0.3;
  const auto d = synth_dataset(s);
  const std::vector<ws::LfSpec> lfs = {{1, 0.8, 0.2, 1}, {3, 0.6, 0.1, 2}};
  PrototypeLfApplicator app(s, lfs, class_shares(d.labels, s.classes), 4);
  const auto votes = app(d.features, d.n);
  const auto stats = ws::lf_stats(votes, d.labels);
  for (std::size_t j = 0; j < lfs.size(); ++j) {
    EXPECT_NEAR(stats.per_lf[j].coverage, lfs[j].target_propensity, 0.01);
    EXPECT_NEAR(*stats.per_lf[j].accuracy, lfs[j].target_accuracy, 0.02);
  }
}

// ---- config ----

TEST(ExperimentConfig, JsonRoundTripPreservesHash) {
  auto c = smoke_config();
  c.lfs = {{2, 0.7, 0.2, 3}};
  const auto back = experiment_config_from_json(to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(ExperimentConfig, HashChangesWithEveryField) {
  const auto base = smoke_config();
  const auto h = config_hash(base);
  std::vector<ExperimentConfig> variants(12, base);
  variants[0].dataset.sigma = 0.61;
  variants[1].dataset.seed = 1;
  variants[2].lf_sampling.count = 11;
  variants[3].training.beta = 0.5;
  variants[4].training.epochs = 6;
  variants[5].seeds = {0, 1};
  variants[6].models = {"mv"};
  variants[7].metrics = {"accuracy"};
  variants[8].augmentation.n_synth = 999;
  variants[9].augmentation.classifier.lr = 1e-3;
  variants[10].output_dir = "elsewhere";
  variants[11].lfs = {{1, 0.7, 0.2, 0}};
  for (const auto& v : variants) EXPECT_NE(config_hash(v), h);
  EXPECT_EQ(config_hash(smoke_config()), h);
}

TEST(ExperimentConfig, ValidationRejectsBadInput) {
  auto c = smoke_config();
  c.seeds.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = smoke_config();
  c.models = {"gpt"};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = smoke_config();
  c.metrics = {"bleu"};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = smoke_config();
  c.training.lr_d = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(experiment_config_from_json(nlohmann::json{{"dataset", {{"sigma", -1.0}}}}), std::invalid_argument);
}

TEST(OutputDir, RelativePathsResolveAgainstEnvironmentRoot) {
  ::setenv(kOutputRootEnv, "/tmp/wsgan_root", 1);
  EXPECT_EQ(resolve_output_dir("runs/a"), fs::path("/tmp/wsgan_root/runs/a"));
  EXPECT_EQ(resolve_output_dir("/abs/b"), fs::path("/abs/b"));
  ::unsetenv(kOutputRootEnv);
  EXPECT_EQ(resolve_output_dir("runs/a"), fs::path("runs/a"));
}

// ---- summaries ----

TEST(Summary, MeansAndStdRecomputeFromRows) {
  std::vector<BenchmarkRow> rows(3);
  const double acc[] = {0.7, 0.8, 0.95};
  for (int i = 0; i < 3; ++i) {
    rows[i].seed = i;
    rows[i].model = "mv";
    rows[i].accuracy = acc[i];
  }
  rows[2].ari = 0.5;
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].metric, "accuracy");
  EXPECT_EQ(s[0].count, 3u);
  EXPECT_NEAR(s[0].mean, (0.7 + 0.8 + 0.95) / 3.0, 1e-15);
  const double m = s[0].mean;
  const double var = ((0.7 - m) * (0.7 - m) + (0.8 - m) * (0.8 - m) + (0.95 - m) * (0.95 - m)) / 2.0;
  EXPECT_NEAR(s[0].stdev, std::sqrt(var), 1e-15);
  EXPECT_EQ(s[1].metric, "ari");
  EXPECT_EQ(s[1].count, 1u);
  EXPECT_EQ(s[1].stdev, 0.0);
}

TEST(Summary, CsvLeavesMissingValuesEmpty) {
  BenchmarkRow r;
  r.model = "infogan";
  r.ari = 0.25;
  const auto csv = rows_csv({r});
  EXPECT_EQ(csv, "seed,model,status,accuracy,weighted_f1,weighted_map,ari,covered_fraction,frechet\n"
                 "0,infogan,ok,,,,0.25,,\n");
}

// ---- benchmark ----

TEST(Benchmark, SmokeRunProducesAllColumnsAndFiles) {
  TempDir tmp;
  const auto c = smoke_config();
  const auto res = run_benchmark(c, tmp.path());
  EXPECT_TRUE(res.manifest.success) << nlohmann::json(res.manifest.failures).dump();
  EXPECT_EQ(res.manifest.config_hash, config_hash(c));
  EXPECT_EQ(res.manifest.tool_version, kToolVersion);
  ASSERT_EQ(res.rows.size(), 5u);
  for (const auto& r : res.rows) {
    EXPECT_EQ(r.status == "ok" || r.status == "not_converged", true) << r.model << " " << r.status;
    if (r.model != "infogan") {
      ASSERT_TRUE(r.accuracy && r.weighted_f1 && r.weighted_map && r.covered_fraction) << r.model;
      EXPECT_GE(*r.accuracy, 0.0);
      EXPECT_LE(*r.accuracy, 1.0);
    }
    if (r.model == "infogan" || r.model == "wsgan_vector" || r.model == "wsgan_encoder") {
      ASSERT_TRUE(r.ari && r.frechet) << r.model;
      EXPECT_GE(*r.frechet, 0.0);
    } else {
      EXPECT_FALSE(r.ari.has_value());
    }
  }
  for (const auto& f : res.manifest.files) EXPECT_TRUE(fs::exists(tmp.path() / f)) << f;
  EXPECT_TRUE(fs::exists(tmp.path() / "manifest.json"));
  const auto csv = slurp(tmp.path() / "benchmark_rows.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "seed,model,status,accuracy,weighted_f1,weighted_map,ari,covered_fraction,frechet");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST(Benchmark, SummaryMatchesRowsAndIsByteStable) {
  TempDir tmp;
  auto c = smoke_config();
  c.models = {"mv", "ds", "wsgan_encoder"};
  c.seeds = {0, 1};
  const auto a = run_benchmark(c, tmp.path() / "a");
  const auto b = run_benchmark(c, tmp.path() / "b");
  for (const auto& s : a.summary) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : a.rows) {
      if (r.model != s.model) continue;
      if (const auto v = row_value(r, s.metric)) {
        sum += *v;
        ++count;
      }
    }
    EXPECT_EQ(count, s.count);
    EXPECT_DOUBLE_EQ(s.mean, sum / static_cast<double>(count)) << s.model << " " << s.metric;
  }
  for (const char* f : {"benchmark_rows.csv", "benchmark_summary.csv", "seed_1/history_wsgan_encoder.csv"}) {
    EXPECT_EQ(slurp(tmp.path() / "a" / f), slurp(tmp.path() / "b" / f)) << f;
  }
}

TEST(Benchmark, MetricSelectionDropsColumns) {
  TempDir tmp;
  auto c = smoke_config();
  c.models = {"mv"};
  c.metrics = {"accuracy"};
  const auto res = run_benchmark(c, tmp.path());
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_TRUE(res.rows[0].accuracy.has_value());
  EXPECT_FALSE(res.rows[0].weighted_f1.has_value());
  EXPECT_TRUE(res.rows[0].covered_fraction.has_value());
}

TEST(Benchmark, FailedSubRunIsRecordedAndOthersContinue) {
  TempDir tmp;
  auto c = smoke_config();
  c.models = {"mv", "wsgan_encoder", "ds"};
  c.training.alpha = std::numeric_limits<double>::max();
  const auto res = run_benchmark(c, tmp.path());
  EXPECT_FALSE(res.manifest.success);
  ASSERT_EQ(res.manifest.failures.size(), 1u);
  EXPECT_NE(res.manifest.failures[0].find("wsgan_encoder"), std::string::npos);
  ASSERT_EQ(res.rows.size(), 3u);
  EXPECT_EQ(res.rows[0].status, "ok");
  EXPECT_EQ(res.rows[1].status, "failed");
  EXPECT_NE(res.rows[2].status, "failed");
  EXPECT_TRUE(fs::exists(tmp.path() / "benchmark_rows.csv"));
}

// ---- augmentation ----

TEST(Augmentation, ZeroSyntheticPointsGiveZeroDelta) {
  TempDir tmp;
  auto c = smoke_config();
  c.augmentation.n_test = 400;
  c.augmentation.classifier.epochs = 5;
  const auto res =
      run_augmentation(c, 0, {gan::AugmentMode::synthetic_pl, gan::AugmentMode::lf_pl}, tmp.path());
  EXPECT_TRUE(res.manifest.success);
  ASSERT_EQ(res.rows.size(), 2u);
  for (const auto& r : res.rows) {
    EXPECT_EQ(r.status, "ok");
    EXPECT_EQ(r.appended, 0u);
    EXPECT_EQ(r.delta, 0.0);
    EXPECT_EQ(r.augmented_accuracy, r.base_accuracy);
  }
  EXPECT_EQ(res.mean_delta.at("synthetic_pl"), 0.0);
  const auto csv = slurp(tmp.path() / "augmentation.csv");
  EXPECT_EQ(csv.rfind("seed,mode,status,base_accuracy,augmented_accuracy,delta,appended,balance_ratio\n", 0), 0u);
}

TEST(Augmentation, RowsReportAppendedPointsOrSkip) {
  TempDir tmp;
  auto c = smoke_config();
  c.augmentation.n_test = 400;
  c.augmentation.classifier.epochs = 5;
  const auto res = run_augmentation(c, 200, {gan::AugmentMode::synthetic_pl}, tmp.path());
  ASSERT_EQ(res.rows.size(), 1u);
  const auto& r = res.rows[0];
  if (r.status == "ok") {
    EXPECT_EQ(r.appended, 200u);
    EXPECT_LE(r.balance_ratio, c.augmentation.balance_tolerance);
  } else {
    EXPECT_EQ(r.status, "augmentation skipped");
    EXPECT_EQ(r.delta, 0.0);
  }
  EXPECT_DOUBLE_EQ(r.delta, r.augmented_accuracy - r.base_accuracy);
}

// ---- theory suite ----

TEST(TheorySuite, DefaultGridPasses) {
  TheoryGrid g;
  g.mc_trials = 20000;
  g.chain_pairs = 40;
  g.hellinger_pairs = 200;
  const auto rep = run_theory_suite(g);
  EXPECT_TRUE(rep.rejected_inputs.empty());
  EXPECT_FALSE(rep.checks.empty());
  for (const auto& chk : rep.checks) EXPECT_TRUE(chk.passed) << chk.name << " " << chk.params << " " << chk.detail;
  EXPECT_TRUE(rep.passed());
}

TEST(TheorySuite, EmptyGridGivesEmptyPassingReport) {
  TheoryGrid g;
  g.m.clear();
  g.alpha.clear();
  g.eps.clear();
  const auto rep = run_theory_suite(g);
  EXPECT_TRUE(rep.checks.empty());
  EXPECT_TRUE(rep.rejected_inputs.empty());
  EXPECT_TRUE(rep.passed());
}

TEST(TheorySuite, OutOfRangeEpsIsRejectedAndRunContinues) {
  TheoryGrid g;
  g.m = {3};
  g.alpha = {0.2};
  g.eps = {0.49, 0.2};
  g.mc_trials = 5000;
  g.chain_pairs = 10;
  g.hellinger_pairs = 0;
  const auto rep = run_theory_suite(g);
  ASSERT_EQ(rep.rejected_inputs.size(), 1u);
  EXPECT_NE(rep.rejected_inputs[0].find("0.49"), std::string::npos);
  bool saw_chain = false;
  for (const auto& chk : rep.checks) saw_chain |= chk.name == "rcgan_tv_chain";
  EXPECT_TRUE(saw_chain);
  EXPECT_TRUE(rep.passed());
}

TEST(TheorySuite, GridFromJsonUsesDefaultsForMissingKeys) {
  const auto g = theory_grid_from_json(nlohmann::json{{"m", {5}}, {"seed", 3}});
  EXPECT_EQ(g.m, std::vector<int>{5});
  EXPECT_EQ(g.alpha, (std::vector<double>{0.1, 0.2, 0.3}));
  EXPECT_EQ(g.seed, 3u);
}
