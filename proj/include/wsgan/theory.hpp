#pragma once

// Numerical checks for the two weak-supervision/generative-model bounds:
// the majority-vote error and its Hoeffding bound, the Hellinger/total
// variation inequalities, the noisy-channel (RCGAN) total variation chain, and
// the assembled generalization bound. Everything is evaluated exactly on
// finite supports, plus Monte Carlo where noted.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <cstdio>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wsgan/rng.hpp"

namespace wsgan::theory {

// ---- majority vote ------------------------------------------------------------

// Hoeffding bound exp(-2 m alpha^2) on the error of a majority vote over m
// independent voters that are each right with probability 1/2 + alpha.
inline double mv_error_bound(int m, double alpha) {
  if (m < 0) throw std::invalid_argument("mv_error_bound: m must be >= 0");
  if (!(alpha > 0.0 && alpha <= 0.5)) throw std::invalid_argument("mv_error_bound: alpha in (0, 1/2]");
  return std::exp(-2.0 * m * alpha * alpha);
}

// Exact majority-vote error: P(#wrong >= m/2) for Binomial(m, eps). Ties are
// counted as errors.
inline double exact_mv_error(int m, double eps) {
  if (m < 0) throw std::invalid_argument("exact_mv_error: m must be >= 0");
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("exact_mv_error: eps in [0, 1]");
  if (m == 0) return 1.0;
  const int first = (m + 1) / 2;  // ceil(m / 2)
  long double total = 0.0L;
  for (int j = first; j <= m; ++j) {
    const long double log_choose = std::lgamma(static_cast<long double>(m) + 1) -
                                   std::lgamma(static_cast<long double>(j) + 1) -
                                   std::lgamma(static_cast<long double>(m - j) + 1);
    total += std::exp(log_choose) * std::pow(static_cast<long double>(eps), j) *
             std::pow(1.0L - static_cast<long double>(eps), m - j);
  }
  return static_cast<double>(std::min(total, 1.0L));
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
};

// Each trial draws m votes, each wrong with probability eps (one uniform per
// vote); the vote errs when at least half are wrong.
inline MonteCarloEstimate simulate_mv_error(int m, double eps, std::int64_t trials,
                                            std::uint64_t seed) {
  if (trials < 1000) throw std::invalid_argument("simulate_mv_error: need >= 1000 trials");
  if (m < 1) throw std::invalid_argument("simulate_mv_error: m must be >= 1");
  Rng rng(seed);
  std::int64_t errors = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    int wrong = 0;
    for (int j = 0; j < m; ++j) wrong += rng.bernoulli(eps) ? 1 : 0;
    if (2 * wrong >= m) ++errors;
  }
  MonteCarloEstimate est;
  est.trials = trials;
  est.mean = static_cast<double>(errors) / static_cast<double>(trials);
  est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(trials));
  return est;
}

// Smallest m with exp(-2 m (1/2 - eps)^2) <= eps.
inline int min_lfs(double eps_lambda) {
  if (!(eps_lambda > 0.0)) throw std::invalid_argument("min_lfs: eps_lambda must be positive");
  if (eps_lambda >= 0.49) {
    throw std::invalid_argument("min_lfs: eps_lambda >= 0.49 makes the required m diverge");
  }
  const double margin = 0.5 - eps_lambda;
  return static_cast<int>(std::ceil(std::log(1.0 / eps_lambda) / (2.0 * margin * margin)));
}

// ---- noisy channel ------------------------------------------------------------

// Binary symmetric label channel [[1-e, e], [e, 1-e]].
class NoisyChannel {
 public:
  explicit NoisyChannel(double eps) : eps_(eps) {
    if (!(eps >= 0.0 && eps < 0.5)) {
      throw std::invalid_argument("NoisyChannel: eps must lie in [0, 1/2); 1/2 is singular");
    }
  }
  double eps() const { return eps_; }
  std::array<std::array<double, 2>, 2> matrix() const {
    return {{{1.0 - eps_, eps_}, {eps_, 1.0 - eps_}}};
  }
  // Explicit inverse via the adjugate.
  std::array<std::array<double, 2>, 2> inverse() const {
    const auto c = matrix();
    const double det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
    return {{{c[1][1] / det, -c[0][1] / det}, {-c[1][0] / det, c[0][0] / det}}};
  }

 private:
  double eps_;
};

// ||C_eps^{-1}||_inf = 1 / (1 - 2 eps).
inline double channel_inf_norm_inverse(double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("channel_inf_norm_inverse: eps must be >= 0");
  if (eps >= 0.5) throw std::invalid_argument("channel_inf_norm_inverse: channel is singular at eps >= 1/2");
  return 1.0 / (1.0 - 2.0 * eps);
}

// Joint distribution over (x, y) with finite x support and y in {0, 1}.
struct FiniteJoint {
  std::vector<std::array<double, 2>> p;

  std::size_t support() const { return p.size(); }
  double total() const {
    double s = 0.0;
    for (const auto& r : p) s += r[0] + r[1];
    return s;
  }
  void validate(double tol = 1e-12) const {
    for (const auto& r : p) {
      if (!(r[0] >= 0.0 && r[1] >= 0.0)) throw std::invalid_argument("FiniteJoint: negative mass");
    }
    if (std::abs(total() - 1.0) > tol) throw std::invalid_argument("FiniteJoint: mass does not sum to 1");
  }
  std::vector<double> flat() const {
    std::vector<double> out;
    for (const auto& r : p) {
      out.push_back(r[0]);
      out.push_back(r[1]);
    }
    return out;
  }
};

// Flat Dirichlet(1) joint on support x 2 cells (exponential spacings).
inline FiniteJoint random_joint(std::size_t support, Rng& rng) {
  FiniteJoint j;
  j.p.resize(support);
  double total = 0.0;
  for (auto& r : j.p) {
    for (double& v : r) {
      v = -std::log(1.0 - rng.uniform());
      total += v;
    }
  }
  for (auto& r : j.p) {
    for (double& v : r) v /= total;
  }
  return j;
}

// P~(x, y~) = sum_y P(x, y) C[y][y~].
inline FiniteJoint apply_channel(const FiniteJoint& joint, const NoisyChannel& channel) {
  const auto c = channel.matrix();
  FiniteJoint out;
  out.p.reserve(joint.p.size());
  for (const auto& r : joint.p) {
    out.p.push_back({r[0] * c[0][0] + r[1] * c[1][0], r[0] * c[0][1] + r[1] * c[1][1]});
  }
  return out;
}

// ---- distances ----------------------------------------------------------------

inline double tv_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("tv_distance: support mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

// Squared-convention Hellinger: sum (sqrt a - sqrt b)^2, in [0, 2].
inline double hellinger(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("hellinger: support mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::sqrt(a[i]) - std::sqrt(b[i]);
    s += d * d;
  }
  return s;
}

inline double tv_distance(const FiniteJoint& a, const FiniteJoint& b) {
  if (a.support() != b.support()) throw std::invalid_argument("tv_distance: support mismatch");
  return tv_distance(a.flat(), b.flat());
}

inline double hellinger(const FiniteJoint& a, const FiniteJoint& b) {
  if (a.support() != b.support()) throw std::invalid_argument("hellinger: support mismatch");
  return hellinger(a.flat(), b.flat());
}

// ---- reports --------------------------------------------------------------------

struct Check {
  std::string name;
  std::string params;
  double lhs = 0.0;
  double rhs = 0.0;
  bool passed = true;
  std::string detail;
};

struct TheoryReport {
  std::vector<Check> checks;
  std::vector<std::string> rejected_inputs;
  std::vector<std::string> notes;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
  }
  void add(Check c) { checks.push_back(std::move(c)); }
  void merge(const TheoryReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    rejected_inputs.insert(rejected_inputs.end(), other.rejected_inputs.begin(),
                           other.rejected_inputs.end());
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
  }
};

inline nlohmann::json to_json(const TheoryReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"params", c.params},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"passed", c.passed},
                      {"detail", c.detail}});
  }
  return {{"passed", r.passed()},
          {"failures", r.failures()},
          {"checks", checks},
          {"rejected_inputs", r.rejected_inputs},
          {"notes", r.notes}};
}

inline std::string to_text(const TheoryReport& r) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-34s %-34s %14s %14s  %s\n", "check", "params", "lhs", "rhs",
                "verdict");
  os << line;
  for (const auto& c : r.checks) {
    std::snprintf(line, sizeof line, "%-34s %-34s %14.8g %14.8g  %s\n", c.name.c_str(),
                  c.params.c_str(), c.lhs, c.rhs, c.passed ? "ok" : "VIOLATED");
    os << line;
  }
  for (const auto& s : r.rejected_inputs) os << "rejected: " << s << '\n';
  for (const auto& s : r.notes) os << "note: " << s << '\n';
  os << (r.passed() ? "all checks passed\n" : "SOME CHECKS FAILED\n");
  return os.str();
}

inline std::string fmt_params(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : kv) {
    os << (first ? "" : " ") << k << '=' << v;
    first = false;
  }
  return os.str();
}

// ---- majority vote checks -------------------------------------------------------

// Exact error <= Hoeffding bound, and the Monte Carlo estimate within
// `sigmas` standard errors of the exact value.
inline TheoryReport check_mv_bound(int m, double alpha, std::int64_t trials, std::uint64_t seed,
                                   double sigmas = 3.0) {
  TheoryReport rep;
  const double eps = 0.5 - alpha;
  const double exact = exact_mv_error(m, eps);
  const double bound = mv_error_bound(m, alpha);
  const auto params = fmt_params({{"m", m}, {"alpha", alpha}});
  rep.add({"mv_exact_le_hoeffding", params, exact, bound, exact <= bound, ""});
  const auto mc = simulate_mv_error(m, eps, trials, seed);
  const double gap = std::abs(mc.mean - exact);
  std::ostringstream d;
  d << "mc=" << mc.mean << " se=" << mc.std_error;
  rep.add({"mv_monte_carlo_within_3se", params, gap, sigmas * mc.std_error,
           gap <= sigmas * mc.std_error, d.str()});
  return rep;
}

// At m = min_lfs(eps): the Hoeffding bound and the exact error are both <= eps.
inline TheoryReport check_min_lfs(double eps_lambda) {
  TheoryReport rep;
  const int m = min_lfs(eps_lambda);
  const auto params = fmt_params({{"eps", eps_lambda}, {"m", m}});
  const double bound = mv_error_bound(m, 0.5 - eps_lambda);
  rep.add({"min_lfs_hoeffding_le_eps", params, bound, eps_lambda, bound <= eps_lambda, ""});
  const double exact = exact_mv_error(m, eps_lambda);
  rep.add({"min_lfs_exact_le_eps", params, exact, eps_lambda, exact <= eps_lambda, ""});
  return rep;
}

// ---- RCGAN total variation chain ----------------------------------------------

struct MvSetting {
  int m = 1;
  double eps_lambda = 0.25;
};

struct ChainEntry {
  double eps_channel = 0.0;  // noise of the channel actually applied
  double tv_noisy = 0.0;
  double tv_clean = 0.0;
  double multiplier = 0.0;                // (1 - 2 eps_channel)^{-1}
  std::optional<double> multiplier_hoeffding;  // (1 - 2 exp(-2 m (1/2 - eps)^2))^{-1}
  std::optional<double> multiplier_single;     // (1 - 2 eps_lambda)^{-1}
  bool holds = true;
  std::vector<std::string> violations;
  nlohmann::json instance;  // serialized inputs when a violation occurs
};

// Checks tv(P~, Q~) <= tv(P, Q) <= ||C^{-1}|| tv(P~, Q~) on the exact finite
// joints. With an MV setting the channel noise is the exact majority-vote
// error, and the multiplier is further compared with its Hoeffding form and
// with the single-LF multiplier (the latter only when m >= min_lfs).
inline ChainEntry verify_rcgan_tv_chain(const FiniteJoint& P, const FiniteJoint& Q, double eps,
                                        std::optional<MvSetting> with_mv = std::nullopt,
                                        double tol = 1e-12) {
  if (P.support() != Q.support()) throw std::invalid_argument("verify_rcgan_tv_chain: support mismatch");
  ChainEntry e;
  e.eps_channel = with_mv ? exact_mv_error(with_mv->m, with_mv->eps_lambda) : eps;
  if (!with_mv && !(eps > 0.0 && eps < 0.5)) {
    throw std::invalid_argument("verify_rcgan_tv_chain: eps must lie in (0, 1/2)");
  }
  const NoisyChannel channel(e.eps_channel);
  const auto Pn = apply_channel(P, channel);
  const auto Qn = apply_channel(Q, channel);
  e.tv_noisy = tv_distance(Pn, Qn);
  e.tv_clean = tv_distance(P, Q);
  e.multiplier = channel_inf_norm_inverse(e.eps_channel);

  auto require = [&](bool ok, const std::string& what) {
    if (!ok) {
      e.holds = false;
      e.violations.push_back(what);
    }
  };
  require(e.tv_noisy <= e.tv_clean + tol, "data processing: tv(P~,Q~) <= tv(P,Q)");
  require(e.tv_clean <= e.multiplier * e.tv_noisy + tol, "inversion: tv(P,Q) <= ||C^-1|| tv(P~,Q~)");
  if (with_mv) {
    const double margin = 0.5 - with_mv->eps_lambda;
    const double hoeff = std::exp(-2.0 * with_mv->m * margin * margin);
    if (hoeff < 0.5) {
      e.multiplier_hoeffding = 1.0 / (1.0 - 2.0 * hoeff);
      require(e.multiplier <= *e.multiplier_hoeffding + tol,
              "hoeffding: ||C_mv^-1|| <= (1 - 2 exp(-2m(1/2-eps)^2))^-1");
    }
    e.multiplier_single = channel_inf_norm_inverse(with_mv->eps_lambda);
    if (with_mv->eps_lambda < 0.49 && with_mv->m >= min_lfs(with_mv->eps_lambda)) {
      require(e.multiplier_hoeffding.has_value() &&
                  *e.multiplier_hoeffding <= *e.multiplier_single + tol,
              "single LF: Hoeffding multiplier <= (1 - 2 eps_lambda)^-1");
    }
  }
  if (!e.holds) {
    e.instance = {{"P", P.flat()}, {"Q", Q.flat()}, {"eps", eps}};
    if (with_mv) {
      e.instance["m"] = with_mv->m;
      e.instance["eps_lambda"] = with_mv->eps_lambda;
    }
  }
  return e;
}

// ---- Hellinger / TV readings ------------------------------------------------------

// The two Hellinger/TV inequalities can be read with D_hel as the squared
// quantity S = sum (sqrt p - sqrt q)^2 or as its root h = sqrt(S). Both
// readings are evaluated; "holds universally" means no violation on the
// random pairs nor on the fixed probe pairs (identical, near-disjoint and
// disjoint distributions).
//
// The squared-convention chain collects the steps that use S directly:
//   S(P,Q) = 2 - 2 sum_x sqrt(p1 q1) (1 - S(p2|x, q2|x) / 2)     (identity)
//   S(P,Q) <= S1 + S2max - S1 S2max / 2 <= S1 + S2max
//   S <= 2 TV   and   TV <= sqrt(S (1 - S/4))
struct ReadingResult {
  std::string name;
  std::size_t random_violations = 0;
  std::size_t probe_violations = 0;
  bool universal() const { return random_violations == 0 && probe_violations == 0; }
};

struct HellingerTvReport {
  std::size_t pairs = 0;
  std::vector<ReadingResult> variants;
  std::size_t chain_violations = 0;
  bool squared_reading_universal = false;
  bool unsquared_reading_universal = false;
  std::vector<nlohmann::json> counterexamples;
};

namespace detail {

inline std::vector<bool> reading_verdicts(double tv, double s, double tol) {
  const double h = std::sqrt(s);
  return {
      s <= std::sqrt(2.0 * tv) + tol,                         // squared: D <= sqrt(2 TV)
      tv <= std::sqrt(s) * std::sqrt(std::max(0.0, 1.0 - s / 4.0)) + tol,  // squared: TV <= sqrt(D) sqrt(1 - D/4)
      h <= std::sqrt(2.0 * tv) + tol,                         // unsquared: h <= sqrt(2 TV)
      tv <= h * std::sqrt(std::max(0.0, 1.0 - h * h / 4.0)) + tol,  // unsquared: TV <= h sqrt(1 - h^2/4)
  };
}

// Squared-chain steps for one joint pair; returns the number of failed steps.
inline std::size_t squared_chain_failures(const FiniteJoint& P, const FiniteJoint& Q, double tol) {
  std::vector<double> p1, q1;
  double bc_sum = 0.0, s2max = 0.0;
  for (std::size_t x = 0; x < P.support(); ++x) {
    const double pm = P.p[x][0] + P.p[x][1];
    const double qm = Q.p[x][0] + Q.p[x][1];
    p1.push_back(pm);
    q1.push_back(qm);
    if (pm <= 0.0 || qm <= 0.0) continue;
    const std::array<double, 2> pc{P.p[x][0] / pm, P.p[x][1] / pm};
    const std::array<double, 2> qc{Q.p[x][0] / qm, Q.p[x][1] / qm};
    const double s2 = hellinger(pc, qc);
    s2max = std::max(s2max, s2);
    bc_sum += std::sqrt(pm * qm) * (1.0 - 0.5 * s2);
  }
  const double s = hellinger(P, Q);
  const double tv = tv_distance(P, Q);
  const double s1 = hellinger(p1, q1);
  std::size_t failures = 0;
  failures += std::abs(s - (2.0 - 2.0 * bc_sum)) > tol;
  failures += s > s1 + s2max - 0.5 * s1 * s2max + tol;
  failures += s1 + s2max - 0.5 * s1 * s2max > s1 + s2max + tol;
  failures += s > 2.0 * tv + tol;
  failures += tv > std::sqrt(s * std::max(0.0, 1.0 - s / 4.0)) + tol;
  return failures;
}

}  // namespace detail

inline HellingerTvReport evaluate_hellinger_readings(std::size_t pairs, std::size_t max_support,
                                                     std::uint64_t seed, double tol = 1e-12) {
  HellingerTvReport rep;
  rep.pairs = pairs;
  rep.variants = {{"squared: D <= sqrt(2 TV)"},
                  {"squared: TV <= sqrt(D) sqrt(1 - D/4)"},
                  {"unsquared: h <= sqrt(2 TV)"},
                  {"unsquared: TV <= h sqrt(1 - h^2/4)"}};
  Rng rng(seed);
  for (std::size_t t = 0; t < pairs; ++t) {
    const std::size_t support = 1 + static_cast<std::size_t>(rng.uniform_int(max_support));
    const auto P = random_joint(support, rng);
    const auto Q = random_joint(support, rng);
    const auto verdicts = detail::reading_verdicts(tv_distance(P, Q), hellinger(P, Q), tol);
    for (std::size_t k = 0; k < verdicts.size(); ++k) {
      if (!verdicts[k]) {
        ++rep.variants[k].random_violations;
        if (rep.counterexamples.size() < 8) {
          rep.counterexamples.push_back({{"variant", rep.variants[k].name}, {"P", P.flat()}, {"Q", Q.flat()}});
        }
      }
    }
    rep.chain_violations += detail::squared_chain_failures(P, Q, tol);
  }
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> probes = {
      {{0.5, 0.5}, {0.5, 0.5}},
      {{0.99, 0.01}, {0.01, 0.99}},
      {{1.0, 0.0}, {0.0, 1.0}},
  };
  for (const auto& [a, b] : probes) {
    const auto verdicts = detail::reading_verdicts(tv_distance(a, b), hellinger(a, b), tol);
    for (std::size_t k = 0; k < verdicts.size(); ++k) {
      if (!verdicts[k]) {
        ++rep.variants[k].probe_violations;
        rep.counterexamples.push_back({{"variant", rep.variants[k].name}, {"P", a}, {"Q", b}});
      }
    }
  }
  rep.squared_reading_universal = rep.variants[0].universal() && rep.variants[1].universal();
  rep.unsquared_reading_universal = rep.variants[2].universal() && rep.variants[3].universal();
  return rep;
}

inline TheoryReport to_report(const HellingerTvReport& h) {
  TheoryReport rep;
  const auto params = fmt_params({{"pairs", static_cast<double>(h.pairs)}});
  for (const auto& v : h.variants) {
    std::ostringstream d;
    d << "random=" << v.random_violations << " probe=" << v.probe_violations
      << (v.universal() ? " (universal)" : " (not universal)");
    // Reading variants are reported, not required.
    rep.add({"hel_tv_reading[" + v.name + "]", params,
             static_cast<double>(v.random_violations + v.probe_violations), 0.0, true, d.str()});
  }
  rep.add({"hel_tv_squared_chain", params, static_cast<double>(h.chain_violations), 0.0,
           h.chain_violations == 0, "violations of the squared-convention chain"});
  rep.notes.push_back(std::string("squared reading holds universally: ") +
                      (h.squared_reading_universal ? "yes" : "no"));
  rep.notes.push_back(std::string("unsquared reading holds universally: ") +
                      (h.unsquared_reading_universal ? "yes" : "no"));
  return rep;
}

// ---- generalization bound ---------------------------------------------------------

struct TheoryInputs {
  double rademacher = 0.0;
  double n1 = 1.0;
  double n2 = 1.0;
  double delta = 0.05;
  double c_g = 1.0;
  double k = 1.0;
  double d = 1.0;
  int m = 1;
  double alpha_margin = 0.25;  // LF accuracy above chance; not the info-loss weight
  double loss_bound = 1.0;

  void validate() const {
    if (!(rademacher >= 0.0)) throw std::invalid_argument("TheoryInputs: rademacher >= 0");
    if (!(n1 > 0.0 && n2 > 0.0)) throw std::invalid_argument("TheoryInputs: n1, n2 > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("TheoryInputs: delta in (0, 1)");
    if (!(c_g > 0.0 && k > 0.0 && d > 0.0)) throw std::invalid_argument("TheoryInputs: c_G, k, d > 0");
    if (m < 0) throw std::invalid_argument("TheoryInputs: m >= 0");
    if (!(alpha_margin > 0.0 && alpha_margin <= 0.5)) {
      throw std::invalid_argument("TheoryInputs: alpha in (0, 1/2]");
    }
    if (!(loss_bound > 0.0)) throw std::invalid_argument("TheoryInputs: loss bound > 0");
  }
};

// 2R + sqrt(log(1/delta) / (2 n2)) + B (4 c_G k d^2 / n1)^{1/4} + B sqrt(2) exp(-m alpha^2)
inline double generalization_bound(const TheoryInputs& in) {
  in.validate();
  return 2.0 * in.rademacher + std::sqrt(std::log(1.0 / in.delta) / (2.0 * in.n2)) +
         in.loss_bound * std::pow(4.0 * in.c_g * in.k * in.d * in.d / in.n1, 0.25) +
         in.loss_bound * std::sqrt(2.0) * std::exp(-in.m * in.alpha_margin * in.alpha_margin);
}

}  // namespace wsgan::theory
