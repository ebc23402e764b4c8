#pragma once

// Labeling functions, the synthetic LF generator, and label models:
// majority vote, one-coin Dawid-Skene, and the weighted-softmax model.
//
// Conventions shared by every function here: class ids are 1..C, a vote of 0
// means abstain, and posterior columns are indexed by class id - 1. Crisp
// labels always break ties toward the lowest class id.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wsgan/rng.hpp"

namespace wsgan::ws {

class InfeasibleLfSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// n x m matrix of votes in {0..classes}.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(std::size_t n, std::size_t m, int classes, std::vector<int> votes)
      : n_(n), m_(m), classes_(classes), votes_(std::move(votes)) {
    if (classes_ < 2) throw std::invalid_argument("LabelMatrix: need at least 2 classes");
    if (votes_.size() != n_ * m_) throw std::invalid_argument("LabelMatrix: vote count");
    for (int v : votes_) {
      if (v < 0 || v > classes_) throw std::out_of_range("LabelMatrix: vote out of range");
    }
  }

  static LabelMatrix abstaining(std::size_t n, std::size_t m, int classes) {
    return LabelMatrix(n, m, classes, std::vector<int>(n * m, 0));
  }

  std::size_t rows() const { return n_; }
  std::size_t lfs() const { return m_; }
  int classes() const { return classes_; }
  int operator()(std::size_t i, std::size_t j) const { return votes_[i * m_ + j]; }
  std::span<const int> row(std::size_t i) const {
    return std::span<const int>(votes_).subspan(i * m_, m_);
  }
  std::span<const int> votes() const { return votes_; }

  bool covered(std::size_t i) const {
    const auto r = row(i);
    return std::any_of(r.begin(), r.end(), [](int v) { return v != 0; });
  }

  // At least one LF column takes more than one value.
  bool has_informative_column() const {
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t i = 1; i < n_; ++i) {
        if ((*this)(i, j) != (*this)(0, j)) return true;
      }
    }
    return false;
  }

  LabelMatrix select_rows(std::span<const std::size_t> index) const {
    std::vector<int> v;
    v.reserve(index.size() * m_);
    for (std::size_t i : index) {
      const auto r = row(i);
      v.insert(v.end(), r.begin(), r.end());
    }
    return LabelMatrix(index.size(), m_, classes_, std::move(v));
  }

  // Appends one LF column.
  LabelMatrix with_column(std::span<const int> column) const {
    if (column.size() != n_) throw std::invalid_argument("with_column: length");
    std::vector<int> v;
    v.reserve(n_ * (m_ + 1));
    for (std::size_t i = 0; i < n_; ++i) {
      const auto r = row(i);
      v.insert(v.end(), r.begin(), r.end());
      v.push_back(column[i]);
    }
    return LabelMatrix(n_, m_ + 1, classes_, std::move(v));
  }

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  int classes_ = 2;
  std::vector<int> votes_;
};

// A unipolar synthetic LF: votes only for target_class, or abstains.
struct LfSpec {
  int target_class = 1;
  double target_accuracy = 1.0;
  double target_propensity = 1.0;
  std::uint64_t seed = 0;

  void validate(int classes) const {
    if (target_class < 1 || target_class > classes) {
      throw std::invalid_argument("LfSpec: target class out of range");
    }
    if (!(target_accuracy > 1.0 / classes && target_accuracy <= 1.0)) {
      throw std::invalid_argument("LfSpec: accuracy must lie in (1/C, 1]");
    }
    if (!(target_propensity > 0.0 && target_propensity <= 1.0)) {
      throw std::invalid_argument("LfSpec: propensity must lie in (0, 1]");
    }
  }
};

// Row-stochastic n x C table of pseudolabel distributions plus the mask of
// rows that received at least one vote.
struct PosteriorTable {
  std::size_t n = 0;
  int classes = 0;
  std::vector<double> probs;
  std::vector<bool> covered;

  PosteriorTable() = default;
  PosteriorTable(std::size_t rows, int c)
      : n(rows), classes(c), probs(rows * static_cast<std::size_t>(c), 1.0 / c),
        covered(rows, false) {}

  std::span<const double> row(std::size_t i) const {
    const auto c = static_cast<std::size_t>(classes);
    return std::span<const double>(probs).subspan(i * c, c);
  }
  std::span<double> row(std::size_t i) {
    const auto c = static_cast<std::size_t>(classes);
    return std::span<double>(probs).subspan(i * c, c);
  }

  int crisp(std::size_t i) const;
  std::vector<int> crisp_labels() const {
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = crisp(i);
    return out;
  }
  std::size_t covered_count() const {
    return static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
  }
};

// Class id (1-based) of the first maximal entry.
inline int argmax_class(std::span<const double> p) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] > p[best]) best = k;
  }
  return static_cast<int>(best) + 1;
}

inline int PosteriorTable::crisp(std::size_t i) const { return argmax_class(row(i)); }

// ---- synthetic LFs --------------------------------------------------------

namespace detail {

// k distinct elements of pool, uniformly, via a partial Fisher-Yates shuffle.
inline std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool,
                                                           std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_int(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace detail

// One unipolar column: round(p n) votes, round(a * votes) of them on samples
// of the target class (true positives), the rest on other samples.
inline std::vector<int> generate_synthetic_lf(std::span<const int> truth, int classes,
                                              const LfSpec& spec) {
  spec.validate(classes);
  const std::size_t n = truth.size();
  std::vector<std::size_t> positives, negatives;
  for (std::size_t i = 0; i < n; ++i) {
    (truth[i] == spec.target_class ? positives : negatives).push_back(i);
  }
  if (positives.empty()) {
    throw InfeasibleLfSpec("synthetic LF: target class " + std::to_string(spec.target_class) +
                           " does not occur in the labels");
  }
  const auto votes = static_cast<std::size_t>(std::llround(spec.target_propensity * n));
  const auto hits = static_cast<std::size_t>(std::llround(spec.target_accuracy * votes));
  const std::size_t misses = votes - hits;
  if (hits > positives.size() || misses > negatives.size()) {
    std::ostringstream msg;
    msg << "synthetic LF infeasible: class " << spec.target_class << " needs " << hits
        << " true positives (have " << positives.size() << ") and " << misses
        << " false positives (have " << negatives.size() << ")";
    throw InfeasibleLfSpec(msg.str());
  }
  Rng rng(spec.seed);
  std::vector<int> column(n, 0);
  for (std::size_t i : detail::sample_without_replacement(std::move(positives), hits, rng)) {
    column[i] = spec.target_class;
  }
  for (std::size_t i : detail::sample_without_replacement(std::move(negatives), misses, rng)) {
    column[i] = spec.target_class;
  }
  return column;
}

inline LabelMatrix generate_synthetic_lfs(std::span<const int> truth, int classes,
                                          std::span<const LfSpec> specs) {
  const std::size_t n = truth.size(), m = specs.size();
  std::vector<int> votes(n * m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const auto column = generate_synthetic_lf(truth, classes, specs[j]);
    for (std::size_t i = 0; i < n; ++i) votes[i * m + j] = column[i];
  }
  return LabelMatrix(n, m, classes, std::move(votes));
}

// ---- LF statistics ----------------------------------------------------------

struct LfStat {
  double coverage = 0.0;
  std::optional<double> accuracy;  // undefined when the LF never votes
  std::size_t votes = 0;
};

struct LfSummary {
  std::vector<LfStat> per_lf;
  double mean_accuracy = std::numeric_limits<double>::quiet_NaN();
  double min_accuracy = std::numeric_limits<double>::quiet_NaN();
  double max_accuracy = std::numeric_limits<double>::quiet_NaN();
  double mean_coverage = 0.0;
};

inline LfSummary lf_stats(const LabelMatrix& L, std::span<const int> truth) {
  if (truth.size() != L.rows()) throw std::invalid_argument("lf_stats: shape mismatch");
  LfSummary s;
  double acc_sum = 0.0;
  std::size_t acc_count = 0;
  for (std::size_t j = 0; j < L.lfs(); ++j) {
    LfStat st;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < L.rows(); ++i) {
      const int v = L(i, j);
      if (v == 0) continue;
      ++st.votes;
      if (v == truth[i]) ++correct;
    }
    st.coverage = L.rows() ? static_cast<double>(st.votes) / static_cast<double>(L.rows()) : 0.0;
    if (st.votes > 0) {
      st.accuracy = static_cast<double>(correct) / static_cast<double>(st.votes);
      acc_sum += *st.accuracy;
      ++acc_count;
      s.min_accuracy = std::isnan(s.min_accuracy) ? *st.accuracy : std::min(s.min_accuracy, *st.accuracy);
      s.max_accuracy = std::isnan(s.max_accuracy) ? *st.accuracy : std::max(s.max_accuracy, *st.accuracy);
    }
    s.mean_coverage += st.coverage;
    s.per_lf.push_back(st);
  }
  if (acc_count) s.mean_accuracy = acc_sum / static_cast<double>(acc_count);
  if (L.lfs()) s.mean_coverage /= static_cast<double>(L.lfs());
  return s;
}

// ---- label models -----------------------------------------------------------

inline std::vector<std::size_t> coverage_filter(const LabelMatrix& L) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < L.rows(); ++i) {
    if (L.covered(i)) out.push_back(i);
  }
  return out;
}

// Mass split evenly over the most-voted classes; uncovered rows stay uniform.
inline PosteriorTable majority_vote(const LabelMatrix& L) {
  PosteriorTable t(L.rows(), L.classes());
  std::vector<int> counts(static_cast<std::size_t>(L.classes()));
  for (std::size_t i = 0; i < L.rows(); ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int v : L.row(i)) {
      if (v != 0) ++counts[static_cast<std::size_t>(v - 1)];
    }
    const int top = *std::max_element(counts.begin(), counts.end());
    if (top == 0) continue;
    t.covered[i] = true;
    const auto winners = std::count(counts.begin(), counts.end(), top);
    auto r = t.row(i);
    for (std::size_t k = 0; k < counts.size(); ++k) {
      r[k] = counts[k] == top ? 1.0 / static_cast<double>(winners) : 0.0;
    }
  }
  return t;
}

// softmax_k( sum_j w_j [votes_j == k] ). Abstains add to no class.
inline std::vector<double> weighted_softmax_posterior(std::span<const int> votes,
                                                      std::span<const double> weights,
                                                      int classes) {
  if (votes.size() != weights.size()) {
    throw std::invalid_argument("weighted_softmax_posterior: votes/weights length");
  }
  std::vector<double> score(static_cast<std::size_t>(classes), 0.0);
  for (std::size_t j = 0; j < votes.size(); ++j) {
    if (!std::isfinite(weights[j])) {
      throw std::invalid_argument("weighted_softmax_posterior: non-finite weight");
    }
    if (votes[j] < 0 || votes[j] > classes) {
      throw std::out_of_range("weighted_softmax_posterior: vote out of range");
    }
    if (votes[j] != 0) score[static_cast<std::size_t>(votes[j] - 1)] += weights[j];
  }
  const double mx = *std::max_element(score.begin(), score.end());
  double z = 0.0;
  for (double& s : score) {
    s = std::exp(s - mx);
    z += s;
  }
  for (double& s : score) s /= z;
  return score;
}

// Vector-mode label model applied to every row.
inline PosteriorTable weighted_softmax_table(const LabelMatrix& L,
                                             std::span<const double> weights) {
  PosteriorTable t(L.rows(), L.classes());
  for (std::size_t i = 0; i < L.rows(); ++i) {
    const auto p = weighted_softmax_posterior(L.row(i), weights, L.classes());
    std::copy(p.begin(), p.end(), t.row(i).begin());
    t.covered[i] = L.covered(i);
  }
  return t;
}

// ---- one-coin Dawid-Skene ---------------------------------------------------

struct DawidSkeneOptions {
  int max_iters = 200;
  double tol = 1e-6;
  double init_accuracy = 0.7;
  bool fit_prior = true;
  double clamp_lo = 1e-4;
  double clamp_hi = 1.0 - 1e-4;
};

struct DawidSkeneResult {
  std::vector<double> accuracies;
  std::vector<double> priors;
  PosteriorTable posteriors;
  // Marginal log-likelihood after initialization and after each EM update.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// E-step. Fills post and returns sum_i log p(lambda_i).
inline double ds_expectation(const LabelMatrix& L, std::span<const double> acc,
                             std::span<const double> prior, PosteriorTable& post) {
  const auto c = static_cast<std::size_t>(L.classes());
  const double wrong_share = 1.0 / static_cast<double>(L.classes() - 1);
  std::vector<double> log_right(L.lfs()), log_wrong(L.lfs());
  for (std::size_t j = 0; j < L.lfs(); ++j) {
    log_right[j] = std::log(acc[j]);
    log_wrong[j] = std::log((1.0 - acc[j]) * wrong_share);
  }
  std::vector<double> lp(c);
  double total = 0.0;
  for (std::size_t i = 0; i < L.rows(); ++i) {
    for (std::size_t k = 0; k < c; ++k) lp[k] = std::log(prior[k]);
    const auto r = L.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j] == 0) continue;
      const auto voted = static_cast<std::size_t>(r[j] - 1);
      for (std::size_t k = 0; k < c; ++k) lp[k] += (k == voted) ? log_right[j] : log_wrong[j];
    }
    const double mx = *std::max_element(lp.begin(), lp.end());
    double z = 0.0;
    for (double v : lp) z += std::exp(v - mx);
    const double lse = mx + std::log(z);
    total += lse;
    auto out = post.row(i);
    for (std::size_t k = 0; k < c; ++k) out[k] = std::exp(lp[k] - lse);
    post.covered[i] = L.covered(i);
  }
  return total;
}

}  // namespace detail

// EM for the symmetric-error model where LF j is right with probability a_j
// and otherwise spreads its error evenly over the other C-1 classes.
inline DawidSkeneResult dawid_skene_fit(const LabelMatrix& L, const DawidSkeneOptions& opt = {}) {
  if (opt.max_iters < 1) throw std::invalid_argument("dawid_skene_fit: max_iters must be >= 1");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("dawid_skene_fit: tol must be positive");
  const auto c = static_cast<std::size_t>(L.classes());
  DawidSkeneResult res;
  res.accuracies.assign(L.lfs(), std::clamp(opt.init_accuracy, opt.clamp_lo, opt.clamp_hi));
  res.priors.assign(c, 1.0 / static_cast<double>(c));
  res.posteriors = PosteriorTable(L.rows(), L.classes());
  res.log_likelihood.push_back(
      detail::ds_expectation(L, res.accuracies, res.priors, res.posteriors));

  for (int it = 1; it <= opt.max_iters; ++it) {
    // M-step: accuracy = posterior-weighted agreement over the LF's votes.
    for (std::size_t j = 0; j < L.lfs(); ++j) {
      double agree = 0.0, count = 0.0;
      for (std::size_t i = 0; i < L.rows(); ++i) {
        const int v = L(i, j);
        if (v == 0) continue;
        agree += res.posteriors.row(i)[static_cast<std::size_t>(v - 1)];
        count += 1.0;
      }
      if (count > 0.0) res.accuracies[j] = std::clamp(agree / count, opt.clamp_lo, opt.clamp_hi);
    }
    if (opt.fit_prior && L.rows() > 0) {
      std::vector<double> p(c, 0.0);
      for (std::size_t i = 0; i < L.rows(); ++i) {
        const auto r = res.posteriors.row(i);
        for (std::size_t k = 0; k < c; ++k) p[k] += r[k];
      }
      double z = 0.0;
      for (double& v : p) {
        v = std::max(v / static_cast<double>(L.rows()), 1e-12);
        z += v;
      }
      for (std::size_t k = 0; k < c; ++k) res.priors[k] = p[k] / z;
    }
    const double ll = detail::ds_expectation(L, res.accuracies, res.priors, res.posteriors);
    const double prev = res.log_likelihood.back();
    res.log_likelihood.push_back(ll);
    res.iterations = it;
    if (std::abs(ll - prev) < opt.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

// ---- serialization ----------------------------------------------------------

// CSV with header lf_0..lf_{m-1}, one integer row per sample.
inline void write_label_matrix_csv(std::ostream& os, const LabelMatrix& L) {
  for (std::size_t j = 0; j < L.lfs(); ++j) os << (j ? "," : "") << "lf_" << j;
  os << '\n';
  for (std::size_t i = 0; i < L.rows(); ++i) {
    const auto r = L.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << r[j];
    os << '\n';
  }
}

inline LabelMatrix read_label_matrix_csv(std::istream& is, int classes) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("label matrix CSV: missing header");
  std::size_t m = line.empty() ? 0 : static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  {
    std::istringstream hs(line);
    std::string cell;
    std::size_t j = 0;
    while (std::getline(hs, cell, ',')) {
      if (cell != "lf_" + std::to_string(j++)) {
        throw std::runtime_error("label matrix CSV: unexpected header cell '" + cell + "'");
      }
    }
  }
  std::vector<int> votes;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(rs, cell, ',')) {
      std::size_t used = 0;
      const int v = std::stoi(cell, &used);
      if (used != cell.size()) throw std::runtime_error("label matrix CSV: non-integer cell");
      votes.push_back(v);
      ++cols;
    }
    if (cols != m) throw std::runtime_error("label matrix CSV: ragged row " + std::to_string(n + 1));
    ++n;
  }
  return LabelMatrix(n, m, classes, std::move(votes));
}

inline nlohmann::json to_json(const LfSpec& s) {
  return {{"target_class", s.target_class},
          {"target_accuracy", s.target_accuracy},
          {"target_propensity", s.target_propensity},
          {"seed", s.seed}};
}

inline LfSpec lf_spec_from_json(const nlohmann::json& j) {
  LfSpec s;
  s.target_class = j.at("target_class").get<int>();
  s.target_accuracy = j.at("target_accuracy").get<double>();
  s.target_propensity = j.at("target_propensity").get<double>();
  s.seed = j.value("seed", std::uint64_t{0});
  return s;
}

// Sidecar describing a label matrix file.
inline nlohmann::json label_matrix_sidecar(const LabelMatrix& L, std::span<const LfSpec> specs) {
  nlohmann::json lfs = nlohmann::json::array();
  for (const auto& s : specs) lfs.push_back(to_json(s));
  return {{"classes", L.classes()}, {"m", L.lfs()}, {"n", L.rows()}, {"lfs", lfs}};
}

inline void write_posteriors_csv(std::ostream& os, const PosteriorTable& t) {
  os << "row,covered,crisp";
  for (int k = 1; k <= t.classes; ++k) os << ",p_" << k;
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < t.n; ++i) {
    os << i << ',' << (t.covered[i] ? 1 : 0) << ',' << t.crisp(i);
    for (double p : t.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", p);
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace wsgan::ws
