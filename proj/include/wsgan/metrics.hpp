#pragma once

// Evaluation: pseudolabel accuracy, support-weighted F1 and mean average
// precision, adjusted Rand index, Frechet distance between Gaussian fits, and
// a small MLP end classifier.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wsgan/adam.hpp"
#include "wsgan/dataset.hpp"
#include "wsgan/layers.hpp"
#include "wsgan/weaksup.hpp"

namespace wsgan::metrics {

// Crisp accuracy over covered rows only. Empty when no row is covered.
inline std::optional<double> pseudolabel_accuracy(const ws::PosteriorTable& post,
                                                  std::span<const int> truth) {
  if (truth.size() != post.n) throw std::invalid_argument("pseudolabel_accuracy: shape mismatch");
  std::size_t covered = 0, correct = 0;
  for (std::size_t i = 0; i < post.n; ++i) {
    if (!post.covered[i]) continue;
    ++covered;
    if (post.crisp(i) == truth[i]) ++correct;
  }
  if (covered == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(covered);
}

inline double accuracy(std::span<const int> predictions, std::span<const int> truth) {
  if (predictions.size() != truth.size() || truth.empty()) {
    throw std::invalid_argument("accuracy: need equal, non-empty inputs");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predictions[i] == truth[i];
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

// One-vs-rest F1 per class present in truth, averaged with support weights.
inline double weighted_f1(std::span<const int> predictions, std::span<const int> truth) {
  if (predictions.size() != truth.size() || truth.empty()) {
    throw std::invalid_argument("weighted_f1: need equal, non-empty inputs");
  }
  std::map<int, std::size_t> support;
  for (int y : truth) ++support[y];
  double total = 0.0;
  for (const auto& [cls, count] : support) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool p = predictions[i] == cls, t = truth[i] == cls;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    const double f1 = denom > 0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    total += f1 * static_cast<double>(count);
  }
  return total / static_cast<double>(truth.size());
}

// Step-wise average precision: sum over distinct score thresholds (high to
// low) of (recall gain) * (precision at that threshold). Tied scores enter
// together.
inline double average_precision(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw std::invalid_argument("average_precision: length");
  const auto total_pos = static_cast<double>(std::count(positive.begin(), positive.end(), true));
  if (total_pos == 0) return 0.0;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double ap = 0.0, tp = 0.0, seen = 0.0, last_recall = 0.0;
  for (std::size_t r = 0; r < order.size();) {
    std::size_t e = r;
    while (e < order.size() && scores[order[e]] == scores[order[r]]) {
      tp += positive[order[e]] ? 1.0 : 0.0;
      seen += 1.0;
      ++e;
    }
    const double recall = tp / total_pos;
    ap += (recall - last_recall) * (tp / seen);
    last_recall = recall;
    r = e;
  }
  return ap;
}

// One-vs-rest AP on the posterior column of each class present in truth,
// averaged with support weights.
inline double weighted_map(const ws::PosteriorTable& post, std::span<const int> truth) {
  if (truth.size() != post.n || truth.empty()) {
    throw std::invalid_argument("weighted_map: need equal, non-empty inputs");
  }
  std::map<int, std::size_t> support;
  for (int y : truth) ++support[y];
  std::vector<double> scores(post.n);
  std::vector<bool> pos_bits(post.n);
  double total = 0.0;
  for (const auto& [cls, count] : support) {
    if (cls < 1 || cls > post.classes) throw std::out_of_range("weighted_map: class id");
    for (std::size_t i = 0; i < post.n; ++i) {
      scores[i] = post.row(i)[static_cast<std::size_t>(cls - 1)];
      pos_bits[i] = truth[i] == cls;
    }
    total += average_precision(scores, pos_bits) * static_cast<double>(count);
  }
  return total / static_cast<double>(truth.size());
}

// Adjusted Rand index from the contingency table. Two single-cluster
// partitions (zero denominator) count as identical.
inline double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("adjusted_rand_index: need equal lengths >= 2");
  }
  std::map<std::pair<int, int>, double> cell;
  std::map<int, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cell[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [k, v] : cell) index += pairs(v);
  for (const auto& [k, v] : ra) sa += pairs(v);
  for (const auto& [k, v] : rb) sb += pairs(v);
  const double expected = sa * sb / pairs(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

// ---- Frechet distance ---------------------------------------------------------

struct GaussianFit {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Mean and unbiased covariance of an (n x d) row-major sample.
inline GaussianFit fit_gaussian(std::span<const double> rows, std::size_t n, std::size_t d) {
  if (rows.size() != n * d) throw std::invalid_argument("fit_gaussian: shape");
  if (n < d + 1) throw std::invalid_argument("fit_gaussian: need at least d+1 points");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      rows.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  GaussianFit g;
  g.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - g.mean.transpose();
  g.cov = centered.transpose() * centered / static_cast<double>(n - 1);
  return g;
}

struct FrechetResult {
  double distance = 0.0;
  bool clipped = false;  // some covariance eigenvalue was clipped at zero
};

namespace detail {

// Symmetric PSD square root with negative eigenvalues clipped to zero.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, bool& clipped) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  Eigen::VectorXd ev = es.eigenvalues();
  const double tiny = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] <= tiny) clipped = true;
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

// |mu1 - mu2|^2 + tr(S1 + S2 - 2 (S1 S2)^{1/2}); the trace of the product's
// root is taken from the symmetric form S1^{1/2} S2 S1^{1/2}.
inline FrechetResult frechet_from_moments(const GaussianFit& a, const GaussianFit& b) {
  if (a.mean.size() != b.mean.size()) throw std::invalid_argument("frechet: dimension mismatch");
  FrechetResult r;
  const Eigen::MatrixXd root_a = detail::psd_sqrt(a.cov, r.clipped);
  detail::psd_sqrt(b.cov, r.clipped);  // only for the clipping flag
  const Eigen::MatrixXd inner = root_a * b.cov * root_a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (inner + inner.transpose()),
                                                     Eigen::EigenvaluesOnly);
  double tr_root = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    tr_root += std::sqrt(std::max(es.eigenvalues()[i], 0.0));
  }
  const double d = (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * tr_root;
  r.distance = std::max(d, 0.0);
  return r;
}

inline FrechetResult frechet_gaussian_distance(std::span<const double> a, std::size_t na,
                                               std::span<const double> b, std::size_t nb,
                                               std::size_t d) {
  return frechet_from_moments(fit_gaussian(a, na, d), fit_gaussian(b, nb, d));
}

// ---- end classifier ---------------------------------------------------------

struct ClassifierConfig {
  std::size_t hidden = 32;
  int epochs = 30;
  std::size_t batch = 32;
  double lr = 3e-3;
  std::uint64_t seed = 0;
};

struct ClassifierResult {
  double test_accuracy = 0.0;
  std::vector<int> predictions;
  std::vector<std::string> warnings;
};

// Two-hidden-layer tanh MLP trained with Adam on hard labels, evaluated by
// argmax accuracy on the test set.
//
// Draw order from Rng(seed): three layer initializations, then one shuffle of
// the training indices per epoch.
inline ClassifierResult train_eval_classifier(const Dataset& train, const Dataset& test,
                                              const ClassifierConfig& cfg = {}) {
  train.validate();
  test.validate();
  if (train.n == 0 || test.n == 0) throw std::invalid_argument("train_eval_classifier: empty set");
  if (train.dim != test.dim || train.classes != test.classes) {
    throw std::invalid_argument("train_eval_classifier: train/test layout differs");
  }
  ClassifierResult res;
  {
    std::vector<bool> seen(static_cast<std::size_t>(train.classes), false);
    for (int y : train.labels) seen[static_cast<std::size_t>(y - 1)] = true;
    for (int k = 0; k < train.classes; ++k) {
      if (!seen[static_cast<std::size_t>(k)]) {
        res.warnings.push_back("class " + std::to_string(k + 1) + " missing from training set");
      }
    }
  }
  const auto classes = static_cast<std::size_t>(train.classes);
  Rng rng(cfg.seed);
  diff::Linear l1(train.dim, cfg.hidden, rng), l2(cfg.hidden, cfg.hidden, rng),
      l3(cfg.hidden, classes, rng);
  std::vector<diff::Tensor> params;
  diff::append(params, l1.params());
  diff::append(params, l2.params());
  diff::append(params, l3.params());
  diff::Adam opt(params, cfg.lr);
  auto forward = [&](const diff::Tensor& x) {
    return l3(diff::tanh(l2(diff::tanh(l1(x)))));
  };

  std::vector<std::size_t> order(train.n);
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < train.n; start += cfg.batch) {
      const std::size_t stop = std::min(train.n, start + cfg.batch);
      std::span<const std::size_t> idx(order.data() + start, stop - start);
      std::vector<int> y;
      for (std::size_t i : idx) y.push_back(train.labels[i]);
      const auto target = diff::one_hot(y, classes);
      const auto logp = diff::log_softmax(forward(train.rows(idx)));
      const auto loss = diff::scale(diff::sum(diff::mul(target, logp)),
                                    -1.0 / static_cast<double>(idx.size()));
      opt.zero_grad();
      loss.backward();
      opt.step();
    }
  }
  const auto logits = forward(test.tensor());
  for (std::size_t i = 0; i < test.n; ++i) {
    res.predictions.push_back(ws::argmax_class(logits.row(i)));
  }
  res.test_accuracy = accuracy(res.predictions, test.labels);
  return res;
}

// ---- report -----------------------------------------------------------------

struct EvalReport {
  std::string model;
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
  double weighted_map = 0.0;
  std::optional<double> ari;
  double covered_fraction = 0.0;
  std::optional<double> frechet_distance;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// Covered-row accuracy, F1, and mAP of a posterior table against truth.
inline EvalReport evaluate_posteriors(const std::string& model, const ws::PosteriorTable& post,
                                      std::span<const int> truth) {
  EvalReport r;
  r.model = model;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < post.n; ++i) {
    if (post.covered[i]) rows.push_back(i);
  }
  r.covered_fraction = post.n ? static_cast<double>(rows.size()) / static_cast<double>(post.n) : 0.0;
  if (rows.empty()) {
    r.accuracy = r.weighted_f1 = r.weighted_map = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  ws::PosteriorTable sub(rows.size(), post.classes);
  std::vector<int> pred, y;
  for (std::size_t r_i = 0; r_i < rows.size(); ++r_i) {
    const auto src = post.row(rows[r_i]);
    std::copy(src.begin(), src.end(), sub.row(r_i).begin());
    sub.covered[r_i] = true;
    pred.push_back(post.crisp(rows[r_i]));
    y.push_back(truth[rows[r_i]]);
  }
  r.accuracy = *pseudolabel_accuracy(sub, y);
  r.weighted_f1 = weighted_f1(pred, y);
  r.weighted_map = weighted_map(sub, y);
  return r;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j{{"model", r.model},
                   {"accuracy", r.accuracy},
                   {"weighted_f1", r.weighted_f1},
                   {"weighted_map", r.weighted_map},
                   {"covered_fraction", r.covered_fraction},
                   {"seed", r.seed},
                   {"config_hash", r.config_hash}};
  j["ari"] = r.ari ? nlohmann::json(*r.ari) : nlohmann::json(nullptr);
  j["frechet_distance"] =
      r.frechet_distance ? nlohmann::json(*r.frechet_distance) : nlohmann::json(nullptr);
  return j;
}

}  // namespace wsgan::metrics
