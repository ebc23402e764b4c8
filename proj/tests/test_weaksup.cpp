#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "wsgan/rng.hpp"
#include "wsgan/weaksup.hpp"

using namespace wsgan;
using ws::LabelMatrix;
using ws::LfSpec;

namespace {

std::vector<int> balanced_labels(std::size_t n, int classes) {
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % classes) + 1;
  return y;
}

LabelMatrix random_matrix(std::size_t n, std::size_t m, int classes, double abstain, Rng& rng) {
  std::vector<int> v(n * m);
  for (int& x : v) {
    x = rng.bernoulli(abstain) ? 0 : static_cast<int>(rng.uniform_int(classes)) + 1;
  }
  return LabelMatrix(n, m, classes, std::move(v));
}

double realized_accuracy(std::span<const int> column, std::span<const int> truth) {
  int votes = 0, hits = 0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (column[i] == 0) continue;
    ++votes;
    hits += column[i] == truth[i];
  }
  return static_cast<double>(hits) / votes;
}

double realized_coverage(std::span<const int> column) {
  return static_cast<double>(std::count_if(column.begin(), column.end(), [](int v) { return v != 0; })) /
         static_cast<double>(column.size());
}

void expect_valid_rows(const ws::PosteriorTable& t) {
  for (std::size_t i = 0; i < t.n; ++i) {
    double s = 0.0;
    for (double p : t.row(i)) {
      EXPECT_GE(p, 0.0);
      s += p;
    }
    EXPECT_NEAR(s, 1.0, 1e-10);
  }
}

// Marginal log-likelihood under the symmetric-error model, as a plain
// product of probabilities per row (no log-space bookkeeping).
double one_coin_log_likelihood(const LabelMatrix& L, const std::vector<double>& acc,
                               const std::vector<double>& prior) {
  double total = 0.0;
  for (std::size_t i = 0; i < L.rows(); ++i) {
    double marginal = 0.0;
    for (int y = 1; y <= L.classes(); ++y) {
      double p = prior[y - 1];
      for (std::size_t j = 0; j < L.lfs(); ++j) {
        const int v = L(i, j);
        if (v == 0) continue;
        p *= v == y ? acc[j] : (1.0 - acc[j]) / (L.classes() - 1);
      }
      marginal += p;
    }
    total += std::log(marginal);
  }
  return total;
}

// Straight EM loop used as a reference for small instances.
struct ReferenceEm {
  std::vector<double> acc, prior;
};

ReferenceEm reference_em(const LabelMatrix& L, int iters) {
  const int c = L.classes();
  ReferenceEm s{std::vector<double>(L.lfs(), 0.7), std::vector<double>(c, 1.0 / c)};
  auto posterior = [&](std::size_t i) {
    std::vector<double> p(c);
    for (int y = 1; y <= c; ++y) {
      p[y - 1] = s.prior[y - 1];
      for (std::size_t j = 0; j < L.lfs(); ++j) {
        const int v = L(i, j);
        if (v != 0) p[y - 1] *= v == y ? s.acc[j] : (1.0 - s.acc[j]) / (c - 1);
      }
    }
    const double z = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x /= z;
    return p;
  };
  for (int t = 0; t < iters; ++t) {
    std::vector<std::vector<double>> post(L.rows());
    for (std::size_t i = 0; i < L.rows(); ++i) post[i] = posterior(i);
    for (std::size_t j = 0; j < L.lfs(); ++j) {
      double agree = 0.0, count = 0.0;
      for (std::size_t i = 0; i < L.rows(); ++i) {
        if (L(i, j) == 0) continue;
        agree += post[i][L(i, j) - 1];
        count += 1.0;
      }
      s.acc[j] = std::clamp(agree / count, 1e-4, 1.0 - 1e-4);
    }
    std::vector<double> pr(c, 0.0);
    for (const auto& p : post) {
      for (int k = 0; k < c; ++k) pr[k] += p[k] / static_cast<double>(L.rows());
    }
    s.prior = pr;
  }
  return s;
}

}  // namespace

// ---- LabelMatrix ------------------------------------------------------------

TEST(LabelMatrix, RejectsOutOfRangeVotesAndShapes) {
  EXPECT_THROW(LabelMatrix(2, 1, 2, {0, 3}), std::out_of_range);
  EXPECT_THROW(LabelMatrix(2, 1, 2, {0, -1}), std::out_of_range);
  EXPECT_THROW(LabelMatrix(2, 2, 2, {0, 1, 1}), std::invalid_argument);
  EXPECT_THROW(LabelMatrix(1, 1, 1, {0}), std::invalid_argument);
}

TEST(LabelMatrix, InformativeColumnDetection) {
  EXPECT_FALSE(LabelMatrix(3, 2, 2, {1, 0, 1, 0, 1, 0}).has_informative_column());
  EXPECT_TRUE(LabelMatrix(3, 2, 2, {1, 0, 1, 2, 1, 0}).has_informative_column());
}

TEST(LabelMatrix, CsvRoundTrip) {
  Rng rng(3);
  const auto L = random_matrix(40, 5, 4, 0.5, rng);
  std::stringstream ss;
  ws::write_label_matrix_csv(ss, L);
  EXPECT_EQ(ss.str().substr(0, 25), "lf_0,lf_1,lf_2,lf_3,lf_4\n");
  const auto back = ws::read_label_matrix_csv(ss, 4);
  ASSERT_EQ(back.rows(), 40u);
  ASSERT_EQ(back.lfs(), 5u);
  EXPECT_TRUE(std::equal(L.votes().begin(), L.votes().end(), back.votes().begin()));
}

TEST(LabelMatrix, CsvRejectsMalformedInput) {
  std::istringstream bad_header("lf_0,lf_2\n1,0\n");
  EXPECT_THROW(ws::read_label_matrix_csv(bad_header, 2), std::runtime_error);
  std::istringstream ragged("lf_0,lf_1\n1,0\n1\n");
  EXPECT_THROW(ws::read_label_matrix_csv(ragged, 2), std::runtime_error);
  std::istringstream range("lf_0\n5\n");
  EXPECT_THROW(ws::read_label_matrix_csv(range, 2), std::out_of_range);
}

TEST(LabelMatrix, SidecarCarriesShapeAndSpecs) {
  const auto y = balanced_labels(100, 2);
  const std::vector<LfSpec> specs{{1, 0.9, 0.2, 5}, {2, 0.8, 0.3, 6}};
  const auto L = ws::generate_synthetic_lfs(y, 2, specs);
  const auto j = ws::label_matrix_sidecar(L, specs);
  EXPECT_EQ(j.at("classes"), 2);
  EXPECT_EQ(j.at("m"), 2);
  EXPECT_EQ(j.at("n"), 100);
  EXPECT_EQ(ws::lf_spec_from_json(j.at("lfs")[1]).target_accuracy, 0.8);
}

// ---- synthetic LFs ------------------------------------------------------------

TEST(SyntheticLf, PerfectSpecOnSingleClassLabels) {
  const std::vector<int> y(50, 1);
  const auto col = ws::generate_synthetic_lf(y, 3, {1, 1.0, 1.0, 11});
  for (int v : col) EXPECT_EQ(v, 1);
}

TEST(SyntheticLf, RealizesTargetsOnBalancedLabels) {
  const auto y = balanced_labels(10000, 4);
  const auto col = ws::generate_synthetic_lf(y, 4, {2, 0.8, 0.2, 17});
  const double acc = realized_accuracy(col, y);
  const double cov = realized_coverage(col);
  EXPECT_GE(acc, 0.78);
  EXPECT_LE(acc, 0.82);
  EXPECT_GE(cov, 0.18);
  EXPECT_LE(cov, 0.22);
}

TEST(SyntheticLf, ColumnsAreUnipolar) {
  const auto y = balanced_labels(2000, 5);
  const auto col = ws::generate_synthetic_lf(y, 5, {4, 0.6, 0.3, 2});
  for (int v : col) EXPECT_TRUE(v == 0 || v == 4);
}

TEST(SyntheticLf, InfeasibleCombinationThrows) {
  const auto y = balanced_labels(1000, 4);
  // 0.9 * 0.5 * 1000 = 450 true positives needed, only 250 exist.
  EXPECT_THROW(ws::generate_synthetic_lf(y, 4, {1, 0.9, 0.5, 0}), ws::InfeasibleLfSpec);
  // target class absent from the labels
  const std::vector<int> ones(10, 1);
  EXPECT_THROW(ws::generate_synthetic_lf(ones, 3, {2, 0.9, 0.1, 0}), ws::InfeasibleLfSpec);
}

TEST(SyntheticLf, InvalidSpecRejected) {
  const auto y = balanced_labels(100, 4);
  EXPECT_THROW(ws::generate_synthetic_lf(y, 4, {1, 0.25, 0.1, 0}), std::invalid_argument);
  EXPECT_THROW(ws::generate_synthetic_lf(y, 4, {1, 0.9, 0.0, 0}), std::invalid_argument);
  EXPECT_THROW(ws::generate_synthetic_lf(y, 4, {5, 0.9, 0.1, 0}), std::invalid_argument);
}

TEST(SyntheticLf, DeterministicGivenSeed) {
  const auto y = balanced_labels(3000, 3);
  const auto a = ws::generate_synthetic_lf(y, 3, {3, 0.7, 0.25, 99});
  const auto b = ws::generate_synthetic_lf(y, 3, {3, 0.7, 0.25, 99});
  const auto c = ws::generate_synthetic_lf(y, 3, {3, 0.7, 0.25, 100});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(SyntheticLf, RandomSpecsConcentrateAtTenThousand) {
  Rng rng(5);
  const auto y = balanced_labels(10000, 4);
  for (int t = 0; t < 30; ++t) {
    LfSpec s{static_cast<int>(rng.uniform_int(4)) + 1, rng.uniform(0.3, 1.0),
             rng.uniform(0.01, 0.25), rng.split()};
    const auto col = ws::generate_synthetic_lf(y, 4, s);
    EXPECT_NEAR(realized_accuracy(col, y), s.target_accuracy, 0.02);
    EXPECT_NEAR(realized_coverage(col), s.target_propensity, 0.02);
  }
}

// A sparse 29-LF, 10-class set in the shape of a real benchmark row:
// extremes 0.564 / 0.931, mean accuracy 0.791, mean coverage 0.047.
TEST(LfStats, SparseTenClassSetReproducesTargetSummary) {
  const int classes = 10;
  const auto y = balanced_labels(30000, classes);
  const double lo = 0.564, hi = 0.931, mean = 0.791;
  const double middle = (29 * mean - lo - hi) / 27.0;
  std::vector<LfSpec> specs;
  for (int j = 0; j < 29; ++j) {
    const double a = j == 0 ? lo : (j == 28 ? hi : middle);
    specs.push_back({j % classes + 1, a, 0.047, static_cast<std::uint64_t>(1000 + j)});
  }
  const auto L = ws::generate_synthetic_lfs(y, classes, specs);
  const auto s = ws::lf_stats(L, y);
  EXPECT_EQ(s.per_lf.size(), 29u);
  EXPECT_NEAR(s.mean_accuracy, 0.791, 1e-3);
  EXPECT_NEAR(s.min_accuracy, 0.564, 1e-3);
  EXPECT_NEAR(s.max_accuracy, 0.931, 1e-3);
  EXPECT_NEAR(s.mean_coverage, 0.047, 1e-4);
}

// ---- lf_stats ---------------------------------------------------------------------

TEST(LfStats, AbstainingColumnHasUndefinedAccuracy) {
  const LabelMatrix L(4, 2, 2, {0, 1, 0, 1, 0, 2, 0, 2});
  const std::vector<int> y{1, 1, 2, 2};
  const auto s = ws::lf_stats(L, y);
  EXPECT_EQ(s.per_lf[0].coverage, 0.0);
  EXPECT_FALSE(s.per_lf[0].accuracy.has_value());
  EXPECT_EQ(*s.per_lf[1].accuracy, 1.0);
  EXPECT_EQ(s.per_lf[1].coverage, 1.0);
  // the undefined column does not drag the mean to zero
  EXPECT_EQ(s.mean_accuracy, 1.0);
}

TEST(LfStats, RandomGuessColumnNearChance) {
  Rng rng(21);
  const auto y = balanced_labels(10000, 4);
  std::vector<int> col(y.size());
  for (int& v : col) v = static_cast<int>(rng.uniform_int(4)) + 1;
  const LabelMatrix L(y.size(), 1, 4, col);
  EXPECT_NEAR(*ws::lf_stats(L, y).per_lf[0].accuracy, 0.25, 0.02);
}

TEST(LfStats, ShapeMismatchThrows) {
  const LabelMatrix L(2, 1, 2, {1, 2});
  const std::vector<int> y{1};
  EXPECT_THROW(ws::lf_stats(L, y), std::invalid_argument);
}

// ---- majority vote -------------------------------------------------------------

TEST(MajorityVote, ClearWinner) {
  const auto t = ws::majority_vote(LabelMatrix(1, 4, 2, {1, 1, 2, 0}));
  EXPECT_EQ(t.row(0)[0], 1.0);
  EXPECT_EQ(t.row(0)[1], 0.0);
  EXPECT_EQ(t.crisp(0), 1);
  EXPECT_TRUE(t.covered[0]);
}

TEST(MajorityVote, TieSplitsMassAndBreaksLow) {
  const auto t = ws::majority_vote(LabelMatrix(1, 2, 2, {2, 1}));
  EXPECT_EQ(t.row(0)[0], 0.5);
  EXPECT_EQ(t.row(0)[1], 0.5);
  EXPECT_EQ(t.crisp(0), 1);
}

TEST(MajorityVote, AllAbstainIsUniformAndUncovered) {
  const auto t = ws::majority_vote(LabelMatrix::abstaining(5, 3, 4));
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_FALSE(t.covered[i]);
    for (double p : t.row(i)) EXPECT_EQ(p, 0.25);
  }
}

TEST(MajorityVote, RowsAreDistributions) {
  Rng rng(8);
  expect_valid_rows(ws::majority_vote(random_matrix(300, 7, 5, 0.6, rng)));
}

// ---- weighted softmax ---------------------------------------------------------

TEST(WeightedSoftmax, HandComputedExample) {
  const std::vector<int> votes{1, 1, 2};
  const std::vector<double> w{1, 1, 1};
  const auto p = ws::weighted_softmax_posterior(votes, w, 2);
  const double e = std::exp(1.0);
  EXPECT_NEAR(p[0], e / (e + 1.0), 1e-15);
  EXPECT_NEAR(p[0], 0.7311, 5e-5);
  EXPECT_NEAR(p[1], 0.2689, 5e-5);
}

TEST(WeightedSoftmax, ZeroWeightsGiveUniform) {
  const std::vector<int> votes{1, 3, 3, 2};
  const std::vector<double> w(4, 0.0);
  for (double p : ws::weighted_softmax_posterior(votes, w, 3)) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
}

TEST(WeightedSoftmax, AbstainingLfChangesNothing) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> votes(6);
    std::vector<double> w(6);
    for (auto& v : votes) v = static_cast<int>(rng.uniform_int(5));
    for (auto& x : w) x = rng.uniform(0.0, 3.0);
    const auto before = ws::weighted_softmax_posterior(votes, w, 4);
    votes.push_back(0);
    w.push_back(rng.uniform(0.0, 100.0));
    const auto after = ws::weighted_softmax_posterior(votes, w, 4);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(before[k], after[k]);
  }
}

TEST(WeightedSoftmax, RejectsBadInputs) {
  const std::vector<int> votes{1, 2};
  const std::vector<double> one{1.0};
  EXPECT_THROW(ws::weighted_softmax_posterior(votes, one, 2), std::invalid_argument);
  const std::vector<double> nan{1.0, std::nan("")};
  EXPECT_THROW(ws::weighted_softmax_posterior(votes, nan, 2), std::invalid_argument);
  const std::vector<int> high{1, 3};
  const std::vector<double> w{1.0, 1.0};
  EXPECT_THROW(ws::weighted_softmax_posterior(high, w, 2), std::out_of_range);
}

TEST(WeightedSoftmax, UniformWeightArgmaxMatchesMajorityVote) {
  Rng rng(12);
  for (int t = 0; t < 1000; ++t) {
    const int c = 2 + static_cast<int>(rng.uniform_int(5));
    const std::size_t m = 1 + rng.uniform_int(8);
    const auto L = random_matrix(6, m, c, rng.uniform(0.0, 0.9), rng);
    const std::vector<double> w(m, rng.uniform(0.05, 4.0));
    const auto mv = ws::majority_vote(L);
    const auto sm = ws::weighted_softmax_table(L, w);
    for (std::size_t i = 0; i < L.rows(); ++i) {
      ASSERT_EQ(mv.crisp(i), sm.crisp(i)) << "trial " << t << " row " << i;
      ASSERT_EQ(mv.covered[i], sm.covered[i]);
    }
  }
}

// One extra vote per class with a common weight shifts every score equally.
TEST(WeightedSoftmax, InvariantToCommonScoreShift) {
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> votes(5);
    std::vector<double> w(5);
    for (auto& v : votes) v = static_cast<int>(rng.uniform_int(4));
    for (auto& x : w) x = rng.uniform(0.0, 2.0);
    const auto base = ws::weighted_softmax_posterior(votes, w, 3);
    const double shift = rng.uniform(0.0, 5.0);
    for (int k = 1; k <= 3; ++k) {
      votes.push_back(k);
      w.push_back(shift);
    }
    const auto shifted = ws::weighted_softmax_posterior(votes, w, 3);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(base[k], shifted[k], 1e-12);
  }
}

TEST(WeightedSoftmax, StrictlyMonotoneInVotedWeight) {
  Rng rng(14);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> votes(4);
    std::vector<double> w(4);
    for (auto& v : votes) v = static_cast<int>(rng.uniform_int(3)) + 1;
    for (auto& x : w) x = rng.uniform(0.0, 2.0);
    const std::size_t j = rng.uniform_int(4);
    const auto k = static_cast<std::size_t>(votes[j] - 1);
    const double before = ws::weighted_softmax_posterior(votes, w, 3)[k];
    w[j] += rng.uniform(0.01, 1.0);
    EXPECT_GT(ws::weighted_softmax_posterior(votes, w, 3)[k], before);
  }
}

// ---- coverage filter ----------------------------------------------------------

TEST(CoverageFilter, EdgeCasesAndOddRows) {
  EXPECT_TRUE(ws::coverage_filter(LabelMatrix::abstaining(6, 2, 2)).empty());
  const auto full = ws::coverage_filter(LabelMatrix(3, 1, 2, {1, 2, 1}));
  EXPECT_EQ(full, (std::vector<std::size_t>{0, 1, 2}));

  std::vector<int> v(20 * 3, 0);
  for (std::size_t i = 1; i < 20; i += 2) v[i * 3 + (i % 3)] = 2;
  std::vector<std::size_t> odd;
  for (std::size_t i = 1; i < 20; i += 2) odd.push_back(i);
  EXPECT_EQ(ws::coverage_filter(LabelMatrix(20, 3, 2, v)), odd);
}

// ---- Dawid-Skene ------------------------------------------------------------------

TEST(DawidSkene, MatchesReferenceEmOnSmallInstance) {
  const LabelMatrix L(6, 3, 3, {1, 1, 0, 2, 2, 1, 3, 3, 3, 1, 1, 2, 2, 2, 0, 3, 3, 1});
  for (int iters : {1, 2, 5}) {
    ws::DawidSkeneOptions opt;
    opt.max_iters = iters;
    opt.tol = 1e-300;
    const auto fit = ws::dawid_skene_fit(L, opt);
    const auto ref = reference_em(L, iters);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(fit.accuracies[j], ref.acc[j], 1e-12);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(fit.priors[k], ref.prior[k], 1e-12);
  }
}

TEST(DawidSkene, IdenticalPerfectColumnsSaturate) {
  const std::vector<int> col{1, 2, 3, 1, 2, 3};
  LabelMatrix L(6, 1, 3, col);
  L = L.with_column(col);
  const auto fit = ws::dawid_skene_fit(L);
  for (double a : fit.accuracies) EXPECT_GT(a, 0.999);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(fit.posteriors.crisp(i), col[i]);
    EXPECT_GT(fit.posteriors.row(i)[col[i] - 1], 0.999);
  }
}

TEST(DawidSkene, SingleColumnArgmaxFollowsVotes) {
  const LabelMatrix L(8, 1, 4, {1, 2, 0, 4, 3, 0, 2, 1});
  ws::DawidSkeneOptions opt;
  opt.fit_prior = false;
  const auto fit = ws::dawid_skene_fit(L, opt);
  for (std::size_t i = 0; i < 8; ++i) {
    if (L(i, 0) == 0) {
      EXPECT_FALSE(fit.posteriors.covered[i]);
    } else {
      EXPECT_EQ(fit.posteriors.crisp(i), L(i, 0));
    }
  }
}

TEST(DawidSkene, LikelihoodTraceIsMonotoneAndRecomputable) {
  Rng rng(30);
  for (int t = 0; t < 100; ++t) {
    const auto L = random_matrix(100, 5, 3, 0.4, rng);
    const auto fit = ws::dawid_skene_fit(L);
    const auto& ll = fit.log_likelihood;
    ASSERT_EQ(ll.size(), static_cast<std::size_t>(fit.iterations) + 1);
    for (std::size_t k = 1; k < ll.size(); ++k) EXPECT_GE(ll[k], ll[k - 1] - 1e-9);
    EXPECT_NEAR(ll.back(), one_coin_log_likelihood(L, fit.accuracies, fit.priors),
                1e-8 * std::abs(ll.back()));
    expect_valid_rows(fit.posteriors);
  }
}

TEST(DawidSkene, IterationCapReportsNotConverged) {
  Rng rng(31);
  const auto L = random_matrix(200, 6, 4, 0.3, rng);
  ws::DawidSkeneOptions opt;
  opt.max_iters = 1;
  opt.tol = 1e-14;
  const auto fit = ws::dawid_skene_fit(L, opt);
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.iterations, 1);
}

TEST(DawidSkene, RejectsBadOptions) {
  const LabelMatrix L(2, 1, 2, {1, 2});
  ws::DawidSkeneOptions opt;
  opt.max_iters = 0;
  EXPECT_THROW(ws::dawid_skene_fit(L, opt), std::invalid_argument);
  opt.max_iters = 5;
  opt.tol = 0.0;
  EXPECT_THROW(ws::dawid_skene_fit(L, opt), std::invalid_argument);
}

TEST(DawidSkene, RecoversAccuraciesOnBalancedSymmetricNoise) {
  // Symmetric-error LFs that always vote, drawn exactly from the model.
  Rng rng(40);
  const auto y = balanced_labels(4000, 3);
  const std::vector<double> acc{0.9, 0.75, 0.6, 0.8, 0.7};
  std::vector<int> v;
  for (int label : y) {
    for (double a : acc) {
      if (rng.bernoulli(a)) {
        v.push_back(label);
      } else {
        v.push_back((label - 1 + 1 + static_cast<int>(rng.uniform_int(2))) % 3 + 1);
      }
    }
  }
  const auto fit = ws::dawid_skene_fit(LabelMatrix(y.size(), acc.size(), 3, v));
  EXPECT_TRUE(fit.converged);
  for (std::size_t j = 0; j < acc.size(); ++j) EXPECT_NEAR(fit.accuracies[j], acc[j], 0.03);
}

TEST(PosteriorCsv, HeaderAndRowLayout) {
  const auto t = ws::majority_vote(LabelMatrix(2, 1, 2, {2, 0}));
  std::ostringstream os;
  ws::write_posteriors_csv(os, t);
  EXPECT_EQ(os.str(), "row,covered,crisp,p_1,p_2\n0,1,2,0,1\n1,0,1,0.5,0.5\n");
}
