#pragma once

// WSGAN: an InfoGAN whose auxiliary code predictor Q is aligned with a
// feature-conditioned weak-supervision label model through two small
// interface maps F1 (code -> label) and F2 (label -> code).
//
// Networks (all MLPs, tanh hidden units):
//   G      [z_dim + C] -> H -> H -> d
//   trunk  d -> H -> H, shared by the heads
//   D      H -> 1, sigmoid        (real vs fake)
//   Q      H -> C, softmax        (discrete code)
//   A      H -> m, sigmoid        (per-sample LF weights; reads detached trunk features)
//   F1, F2 C -> C, softmax
// In vector mode the LF weights are sigmoid(a) for one learned m-vector a.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wsgan/adam.hpp"
#include "wsgan/dataset.hpp"
#include "wsgan/diffcore.hpp"
#include "wsgan/layers.hpp"
#include "wsgan/metrics.hpp"
#include "wsgan/rng.hpp"
#include "wsgan/weaksup.hpp"

namespace wsgan::gan {

using diff::Tensor;

inline constexpr double kProbFloor = 1e-7;
inline constexpr double kProbCeil = 1.0 - 1e-7;

enum class Mode { encoder, vector, infogan };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::encoder:
      return "encoder";
    case Mode::vector:
      return "vector";
    case Mode::infogan:
      return "infogan";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "encoder") return Mode::encoder;
  if (s == "vector") return Mode::vector;
  if (s == "infogan") return Mode::infogan;
  throw std::invalid_argument("unknown mode '" + s + "' (expected encoder, vector or infogan)");
}

struct TrainingConfig {
  double alpha = 1.0;  // info-loss weight
  double beta = 1.0;   // alignment weight
  double gamma = 1.5;  // penalty decay
  double lr_d = 4e-4;
  double lr_g = 1e-4;
  double lr_info = 1e-4;
  double lr_ws = 8e-5;
  std::size_t batch = 16;
  int epochs = 60;
  std::size_t z_dim = 16;
  std::size_t hidden = 64;
  double label_smoothing = 0.1;  // real target 1 - s, fake target s
  double flip_prob = 0.03;
  std::uint64_t seed = 0;
  Mode mode = Mode::encoder;

  void validate() const {
    if (!(lr_d > 0 && lr_g > 0 && lr_info > 0 && lr_ws > 0)) {
      throw std::invalid_argument("TrainingConfig: learning rates must be positive");
    }
    if (!(gamma >= 0.0)) throw std::invalid_argument("TrainingConfig: gamma must be >= 0");
    if (!(alpha >= 0.0 && beta >= 0.0)) throw std::invalid_argument("TrainingConfig: alpha, beta >= 0");
    if (batch == 0 || z_dim == 0 || hidden == 0) {
      throw std::invalid_argument("TrainingConfig: batch, z_dim, hidden must be positive");
    }
    if (epochs < 0) throw std::invalid_argument("TrainingConfig: epochs must be >= 0");
    if (!(label_smoothing >= 0.0 && label_smoothing < 0.5)) {
      throw std::invalid_argument("TrainingConfig: label smoothing in [0, 1/2)");
    }
    if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw std::invalid_argument("TrainingConfig: flip_prob in [0, 1]");
  }
};

inline nlohmann::json to_json(const TrainingConfig& c) {
  return {{"alpha", c.alpha},     {"beta", c.beta},       {"gamma", c.gamma},
          {"lr_d", c.lr_d},       {"lr_g", c.lr_g},       {"lr_info", c.lr_info},
          {"lr_ws", c.lr_ws},     {"batch", c.batch},     {"epochs", c.epochs},
          {"z_dim", c.z_dim},     {"hidden", c.hidden},   {"label_smoothing", c.label_smoothing},
          {"flip_prob", c.flip_prob}, {"seed", c.seed},   {"mode", to_string(c.mode)}};
}

inline TrainingConfig training_config_from_json(const nlohmann::json& j) {
  TrainingConfig c;
  c.alpha = j.value("alpha", c.alpha);
  c.beta = j.value("beta", c.beta);
  c.gamma = j.value("gamma", c.gamma);
  c.lr_d = j.value("lr_d", c.lr_d);
  c.lr_g = j.value("lr_g", c.lr_g);
  c.lr_info = j.value("lr_info", c.lr_info);
  c.lr_ws = j.value("lr_ws", c.lr_ws);
  c.batch = j.value("batch", c.batch);
  c.epochs = j.value("epochs", c.epochs);
  c.z_dim = j.value("z_dim", c.z_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.label_smoothing = j.value("label_smoothing", c.label_smoothing);
  c.flip_prob = j.value("flip_prob", c.flip_prob);
  c.seed = j.value("seed", c.seed);
  if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
  c.validate();
  return c;
}

// ---- model ------------------------------------------------------------------

struct Dims {
  std::size_t data_dim = 2;
  std::size_t classes = 4;
  std::size_t lfs = 1;
  std::size_t z_dim = 16;
  std::size_t hidden = 64;
};

struct ModelBundle {
  Dims dims;
  Mode mode = Mode::encoder;
  diff::Linear g1, g2, g3;
  diff::Linear t1, t2;
  diff::Linear d_head, q_head, a_head;
  diff::Linear f1, f2;
  Tensor a_vector;  // 1 x m raw weights, vector mode
  std::string rng_state;

  // Initialization draw order: g1, g2, g3, t1, t2, d_head, q_head, a_head,
  // f1, f2 (Xavier-uniform, row-major). It is the same for every mode so that
  // runs differing only in mode share their G/D/Q initialization.
  static ModelBundle init(const Dims& dims, Mode mode, Rng& rng) {
    if (dims.classes < 2 || dims.data_dim == 0 || dims.lfs == 0) {
      throw std::invalid_argument("ModelBundle: need classes >= 2, data_dim >= 1, lfs >= 1");
    }
    ModelBundle b;
    b.dims = dims;
    b.mode = mode;
    const std::size_t h = dims.hidden;
    b.g1 = diff::Linear(dims.z_dim + dims.classes, h, rng);
    b.g2 = diff::Linear(h, h, rng);
    b.g3 = diff::Linear(h, dims.data_dim, rng);
    b.t1 = diff::Linear(dims.data_dim, h, rng);
    b.t2 = diff::Linear(h, h, rng);
    b.d_head = diff::Linear(h, 1, rng);
    b.q_head = diff::Linear(h, dims.classes, rng);
    b.a_head = diff::Linear(h, dims.lfs, rng);
    // Near-zero weights and zero bias: A starts at 0.5 for every LF and input.
    for (double& w : b.a_head.weight.mutable_values()) w *= 0.01;
    b.f1 = diff::Linear(dims.classes, dims.classes, rng);
    b.f2 = diff::Linear(dims.classes, dims.classes, rng);
    b.a_vector = Tensor::zeros(1, dims.lfs, true);
    return b;
  }

  Tensor generate(const Tensor& z, const Tensor& codes) const {
    return g3(diff::tanh(g2(diff::tanh(g1(diff::concat(z, codes))))));
  }
  Tensor features(const Tensor& x) const { return diff::tanh(t2(diff::tanh(t1(x)))); }
  Tensor discriminate(const Tensor& feats) const { return diff::sigmoid(d_head(feats)); }
  Tensor code_posterior(const Tensor& feats) const { return diff::softmax(q_head(feats)); }
  // LF weights for each row of feats (encoder) or the shared vector (vector mode).
  Tensor lf_weights(const Tensor& feats) const {
    if (mode == Mode::vector) return diff::sigmoid(a_vector);
    return diff::sigmoid(a_head(diff::detach(feats)));
  }
  Tensor code_to_label(const Tensor& q) const { return diff::softmax(f1(q)); }

  std::vector<Tensor> generator_params() const {
    std::vector<Tensor> p;
    diff::append(p, g1.params());
    diff::append(p, g2.params());
    diff::append(p, g3.params());
    return p;
  }
  std::vector<Tensor> trunk_params() const {
    std::vector<Tensor> p;
    diff::append(p, t1.params());
    diff::append(p, t2.params());
    return p;
  }
  std::vector<Tensor> discriminator_params() const {
    auto p = trunk_params();
    diff::append(p, d_head.params());
    return p;
  }
  std::vector<Tensor> info_params() const {
    auto p = generator_params();
    diff::append(p, trunk_params());
    diff::append(p, q_head.params());
    return p;
  }
  std::vector<Tensor> alignment_params() const {
    auto p = trunk_params();
    diff::append(p, q_head.params());
    if (mode == Mode::vector) {
      p.push_back(a_vector);
    } else {
      diff::append(p, a_head.params());
    }
    diff::append(p, f1.params());
    diff::append(p, f2.params());
    return p;
  }

  // Named parameter tensors in a fixed order (checkpoint layout).
  std::vector<std::pair<std::string, Tensor>> named_params() const {
    std::vector<std::pair<std::string, Tensor>> out;
    auto add = [&](const std::string& name, const diff::Linear& l) {
      out.emplace_back(name + ".weight", l.weight);
      out.emplace_back(name + ".bias", l.bias);
    };
    add("g1", g1);
    add("g2", g2);
    add("g3", g3);
    add("t1", t1);
    add("t2", t2);
    add("d_head", d_head);
    add("q_head", q_head);
    add("a_head", a_head);
    add("f1", f1);
    add("f2", f2);
    out.emplace_back("a_vector", a_vector);
    return out;
  }

  // Deep copy with fresh parameter leaves.
  ModelBundle clone() const {
    ModelBundle c = *this;
    auto copy = [](diff::Linear& l) {
      l.weight = Tensor(l.weight.rows(), l.weight.cols(),
                        {l.weight.values().begin(), l.weight.values().end()}, true);
      l.bias = Tensor(l.bias.rows(), l.bias.cols(), {l.bias.values().begin(), l.bias.values().end()}, true);
    };
    for (diff::Linear* l : {&c.g1, &c.g2, &c.g3, &c.t1, &c.t2, &c.d_head, &c.q_head, &c.a_head, &c.f1, &c.f2}) {
      copy(*l);
    }
    c.a_vector = Tensor(1, dims.lfs, {a_vector.values().begin(), a_vector.values().end()}, true);
    return c;
  }
};

// ---- loss terms -----------------------------------------------------------------

// mean log D(x) + mean log(1 - D(G(z, b))), with probabilities clamped to
// [1e-7, 1 - 1e-7].
inline Tensor gan_value(const Tensor& d_real, const Tensor& d_fake) {
  const auto one_minus = diff::add_scalar(diff::scale(d_fake, -1.0), 1.0);
  return diff::add(diff::mean(diff::clamped_log(d_real, kProbFloor, kProbCeil)),
                   diff::mean(diff::clamped_log(one_minus, kProbFloor, kProbCeil)));
}

// Binary cross-entropy of probabilities against per-row targets.
inline Tensor binary_cross_entropy(const Tensor& prob, const Tensor& target) {
  const auto log_p = diff::clamped_log(prob, kProbFloor, kProbCeil);
  const auto log_q = diff::clamped_log(diff::add_scalar(diff::scale(prob, -1.0), 1.0), kProbFloor, kProbCeil);
  const auto one_minus_t = diff::add_scalar(diff::scale(target, -1.0), 1.0);
  return diff::scale(diff::mean(diff::add(diff::mul(target, log_p), diff::mul(one_minus_t, log_q))), -1.0);
}

inline Tensor discriminator_loss(const Tensor& d_real, const Tensor& real_target, const Tensor& d_fake,
                                 const Tensor& fake_target) {
  return diff::add(binary_cross_entropy(d_real, real_target), binary_cross_entropy(d_fake, fake_target));
}

// Non-saturating generator loss -mean log D(G(z, b)).
inline Tensor generator_loss(const Tensor& d_fake) {
  return diff::scale(diff::mean(diff::clamped_log(d_fake, kProbFloor, kProbCeil)), -1.0);
}

// Mean cross-entropy -sum_k b_k log q_k of sampled one-hot codes under Q.
inline Tensor info_loss(const Tensor& codes, const Tensor& q_out) {
  if (codes.rows() != q_out.rows() || codes.cols() != q_out.cols()) {
    throw std::invalid_argument("info_loss: shape mismatch");
  }
  const auto ll = diff::row_sum(diff::mul(codes, diff::clamped_log(q_out, kProbFloor, kProbCeil)));
  return diff::scale(diff::mean(ll), -1.0);
}

// Mean soft-target cross-entropy -sum_k target_k log_prob_k.
inline Tensor soft_cross_entropy(const Tensor& log_prob, const Tensor& target) {
  return diff::scale(diff::mean(diff::row_sum(diff::mul(target, log_prob))), -1.0);
}

// C / (i gamma + 1)
inline double penalty_multiplier(std::size_t classes, int epoch, double gamma) {
  return static_cast<double>(classes) / (static_cast<double>(epoch) * gamma + 1.0);
}

struct AlignmentTerms {
  Tensor total;         // code_to_label + label_to_code + penalty (unscaled by beta)
  Tensor code_to_label;  // CE(F1(Q(x)), detach(y_hat))
  Tensor label_to_code;  // CE(F2(y_hat), detach(Q(x)))
  Tensor penalty;       // multiplier * mse(theta, 0.5)
  double multiplier = 0.0;
  Tensor y_hat;
  Tensor theta;
};

// The alignment term on a batch whose rows all carry at least one LF vote.
// votes is the batch's row-major (rows x m) vote block.
inline AlignmentTerms alignment_loss(const Tensor& x, std::span<const int> votes, const ModelBundle& b,
                                     int epoch, double gamma) {
  const std::size_t n = x.rows(), m = b.dims.lfs, c = b.dims.classes;
  if (votes.size() != n * m) throw std::invalid_argument("alignment_loss: vote block shape");
  AlignmentTerms t;
  const auto feats = b.features(x);
  const auto q = b.code_posterior(feats);
  t.theta = b.lf_weights(feats);
  t.y_hat = diff::softmax(diff::weighted_votes(t.theta, votes, n, m, c));
  t.code_to_label = soft_cross_entropy(diff::log_softmax(b.f1(q)), diff::detach(t.y_hat));
  t.label_to_code = soft_cross_entropy(diff::log_softmax(b.f2(t.y_hat)), diff::detach(q));
  t.multiplier = penalty_multiplier(c, epoch, gamma);
  t.penalty = diff::scale(diff::mean(diff::square(diff::add_scalar(t.theta, -0.5))), t.multiplier);
  t.total = diff::add(diff::add(t.code_to_label, t.label_to_code), t.penalty);
  return t;
}

// ---- inference ----------------------------------------------------------------

enum class PseudolabelSource { lf, synthetic };

struct PseudolabelBatch {
  ws::PosteriorTable table;
  std::vector<PseudolabelSource> source;
};

// Rows with at least one vote use the label model with A's weights; rows
// without votes use F1(Q(x)).
inline PseudolabelBatch predict_pseudolabels(const ModelBundle& b, const Tensor& x,
                                             const ws::LabelMatrix* votes) {
  const std::size_t n = x.rows();
  if (votes && votes->rows() != n) throw std::invalid_argument("predict_pseudolabels: row mismatch");
  if (votes && votes->lfs() != b.dims.lfs) throw std::invalid_argument("predict_pseudolabels: LF count");
  PseudolabelBatch out;
  out.table = ws::PosteriorTable(n, static_cast<int>(b.dims.classes));
  out.source.assign(n, PseudolabelSource::synthetic);
  if (n == 0) return out;
  const auto feats = b.features(x);
  const auto code_label = b.code_to_label(b.code_posterior(feats));
  const auto weights = b.lf_weights(feats);
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = out.table.row(i);
    if (votes && votes->covered(i)) {
      const auto w = weights.row(weights.rows() == 1 ? 0 : i);
      const auto p = ws::weighted_softmax_posterior(votes->row(i), w, static_cast<int>(b.dims.classes));
      std::copy(p.begin(), p.end(), dst.begin());
      out.table.covered[i] = true;
      out.source[i] = PseudolabelSource::lf;
    } else {
      const auto p = code_label.row(i);
      std::copy(p.begin(), p.end(), dst.begin());
    }
  }
  return out;
}

// argmax Q(x) as a 1-based cluster id per row.
inline std::vector<int> predict_codes(const ModelBundle& b, const Tensor& x) {
  const auto q = b.code_posterior(b.features(x));
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = ws::argmax_class(q.row(i));
  return out;
}

struct CodeSpec {
  std::optional<int> fixed_class;  // empty: uniform over classes
};

struct SampleBatch {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<int> codes;
};

namespace detail {

// Draw order: n codes (uniform_int) then n * z_dim normals, row-major.
inline void draw_latents(std::size_t n, const Dims& dims, const CodeSpec& spec, Rng& rng,
                         std::vector<int>& codes, std::vector<double>& z) {
  codes.resize(n);
  for (auto& c : codes) {
    c = spec.fixed_class ? *spec.fixed_class : static_cast<int>(rng.uniform_int(dims.classes)) + 1;
  }
  z.resize(n * dims.z_dim);
  for (double& v : z) v = rng.normal();
}

}  // namespace detail

inline SampleBatch generate_samples(const ModelBundle& b, std::size_t n, const CodeSpec& spec,
                                    std::uint64_t seed) {
  if (spec.fixed_class && (*spec.fixed_class < 1 || *spec.fixed_class > static_cast<int>(b.dims.classes))) {
    throw std::invalid_argument("generate_samples: fixed class out of range");
  }
  SampleBatch s;
  s.n = n;
  s.dim = b.dims.data_dim;
  if (n == 0) return s;
  Rng rng(seed);
  std::vector<double> z;
  detail::draw_latents(n, b.dims, spec, rng, s.codes, z);
  const auto x = b.generate(Tensor(n, b.dims.z_dim, std::move(z)), diff::one_hot(s.codes, b.dims.classes));
  s.features.assign(x.values().begin(), x.values().end());
  return s;
}

// ---- training --------------------------------------------------------------------

struct EpochRecord {
  int epoch = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double info_loss = 0.0;
  double align_loss = 0.0;
  double penalty = 0.0;
  double ari = 0.0;
  double pl_accuracy = 0.0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
};

inline void write_history_csv(std::ostream& os, const TrainingHistory& h) {
  os << "epoch,d_loss,g_loss,info_loss,align_loss,penalty,ari,pl_accuracy\n";
  char buf[512];
  for (const auto& r : h.epochs) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.epoch, r.d_loss,
                  r.g_loss, r.info_loss, r.align_loss, r.penalty, r.ari, r.pl_accuracy);
    os << buf;
  }
}

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainResult {
  ModelBundle bundle;
  TrainingHistory history;
};

inline Dims dims_for(const Dataset& data, const ws::LabelMatrix& L, const TrainingConfig& cfg) {
  return {data.dim, static_cast<std::size_t>(data.classes), L.lfs(), cfg.z_dim, cfg.hidden};
}

// Per-epoch evaluation: ARI of argmax Q against the hidden labels, and the
// crisp accuracy of the LF-path pseudolabels on covered rows.
inline void evaluate_epoch(const ModelBundle& b, const Dataset& data, const ws::LabelMatrix& L,
                           EpochRecord& rec) {
  const auto x = data.tensor();
  rec.ari = metrics::adjusted_rand_index(predict_codes(b, x), data.labels);
  const auto pl = predict_pseudolabels(b, x, &L);
  rec.pl_accuracy = metrics::pseudolabel_accuracy(pl.table, data.labels).value_or(0.0);
}

// Trains G, D, Q (and A, F1, F2 unless mode is infogan) with four Adam
// optimizers. Per epoch: one shuffle of the sample order. Per batch, in this
// order:
//   1. codes and noise for B fake samples (see draw_latents), then B flip
//      draws for the real rows and B for the fake rows;
//   2. D step on smoothed/flipped real-vs-fake targets (lr_d);
//   3. G step, non-saturating loss (lr_g);
//   4. info step on G, trunk and Q with alpha * CE(b, Q(G(z, b))) (lr_info);
//   5. alignment step on the batch rows that carry a vote, beta * alignment
//      term (lr_ws). Skipped in infogan mode; consumes no random draws.
inline TrainResult train(const Dataset& data, const ws::LabelMatrix& L, const TrainingConfig& cfg) {
  cfg.validate();
  data.validate();
  if (L.rows() != data.n) throw std::invalid_argument("train: label matrix rows differ from dataset");
  if (static_cast<int>(L.classes()) != data.classes) throw std::invalid_argument("train: class count mismatch");
  for (std::size_t k = 0; k < data.features.size(); ++k) {
    if (!std::isfinite(data.features[k])) {
      throw std::invalid_argument("train: non-finite feature in row " + std::to_string(k / data.dim));
    }
  }
  const auto covered_rows = ws::coverage_filter(L);
  if (cfg.mode != Mode::infogan && covered_rows.empty()) {
    throw std::invalid_argument("train: no sample carries an LF vote");
  }

  Rng rng(cfg.seed);
  TrainResult out;
  auto& b = out.bundle;
  b = ModelBundle::init(dims_for(data, L, cfg), cfg.mode, rng);
  b.rng_state = rng.state();
  if (cfg.epochs == 0) return out;

  diff::Adam opt_d(b.discriminator_params(), cfg.lr_d);
  diff::Adam opt_g(b.generator_params(), cfg.lr_g);
  diff::Adam opt_info(b.info_params(), cfg.lr_info);
  diff::Adam opt_ws(b.alignment_params(), cfg.lr_ws);

  const std::size_t classes = b.dims.classes, m = b.dims.lfs;
  std::vector<std::size_t> order(data.n);
  std::iota(order.begin(), order.end(), 0);

  auto checked = [](double v, const char* term, int epoch) {
    if (!std::isfinite(v)) {
      throw TrainingError(std::string("non-finite ") + term + " loss at epoch " + std::to_string(epoch));
    }
    return v;
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    EpochRecord rec;
    rec.epoch = epoch;
    std::size_t batches = 0, align_batches = 0;
    const char* term = "discriminator";
    try {
      for (std::size_t start = 0; start < data.n; start += cfg.batch) {
        const std::size_t stop = std::min(data.n, start + cfg.batch);
        const std::span<const std::size_t> idx(order.data() + start, stop - start);
        const std::size_t bs = idx.size();
        term = "discriminator";

        std::vector<int> codes;
        std::vector<double> z;
        detail::draw_latents(bs, b.dims, CodeSpec{}, rng, codes, z);
        std::vector<double> real_t(bs, 1.0 - cfg.label_smoothing), fake_t(bs, cfg.label_smoothing);
        for (double& t : real_t) {
          if (rng.bernoulli(cfg.flip_prob)) t = cfg.label_smoothing;
        }
        for (double& t : fake_t) {
          if (rng.bernoulli(cfg.flip_prob)) t = 1.0 - cfg.label_smoothing;
        }
        const Tensor z_t(bs, b.dims.z_dim, std::move(z));
        const Tensor code_t = diff::one_hot(codes, classes);
        const Tensor x_real = data.rows(idx);

        {
          const auto d_real = b.discriminate(b.features(x_real));
          const auto fake = diff::detach(b.generate(z_t, code_t));
          const auto d_fake = b.discriminate(b.features(fake));
          const auto loss = discriminator_loss(d_real, Tensor(bs, 1, real_t), d_fake, Tensor(bs, 1, fake_t));
          rec.d_loss += checked(loss.item(), term, epoch);
          opt_d.zero_grad();
          loss.backward();
          opt_d.step();
        }
        term = "generator";
        {
          const auto d_fake = b.discriminate(b.features(b.generate(z_t, code_t)));
          const auto loss = generator_loss(d_fake);
          rec.g_loss += checked(loss.item(), term, epoch);
          opt_g.zero_grad();
          loss.backward();
          opt_g.step();
        }
        term = "info";
        {
          const auto q = b.code_posterior(b.features(b.generate(z_t, code_t)));
          const auto loss = diff::scale(info_loss(code_t, q), cfg.alpha);
          rec.info_loss += checked(loss.item(), term, epoch);
          opt_info.zero_grad();
          loss.backward();
          opt_info.step();
        }
        ++batches;

        if (cfg.mode == Mode::infogan) continue;
        term = "alignment";
        std::vector<std::size_t> cov;
        for (std::size_t i : idx) {
          if (L.covered(i)) cov.push_back(i);
        }
        if (cov.empty()) continue;
        std::vector<int> votes;
        votes.reserve(cov.size() * m);
        for (std::size_t i : cov) {
          const auto r = L.row(i);
          votes.insert(votes.end(), r.begin(), r.end());
        }
        const auto terms = alignment_loss(data.rows(cov), votes, b, epoch, cfg.gamma);
        const auto loss = diff::scale(terms.total, cfg.beta);
        rec.align_loss += checked(terms.total.item(), term, epoch);
        rec.penalty += terms.penalty.item();
        ++align_batches;
        opt_ws.zero_grad();
        loss.backward();
        opt_ws.step();
      }
    } catch (const diff::NumericError& e) {
      throw TrainingError(std::string("non-finite ") + term + " loss at epoch " + std::to_string(epoch) + ": " +
                          e.what());
    }
    if (batches) {
      rec.d_loss /= static_cast<double>(batches);
      rec.g_loss /= static_cast<double>(batches);
      rec.info_loss /= static_cast<double>(batches);
    }
    if (align_batches) {
      rec.align_loss /= static_cast<double>(align_batches);
      rec.penalty /= static_cast<double>(align_batches);
    }
    evaluate_epoch(b, data, L, rec);
    out.history.epochs.push_back(rec);
  }
  b.rng_state = rng.state();
  return out;
}

// ---- augmentation -------------------------------------------------------------------

struct BalanceReport {
  bool passed = false;
  std::vector<std::size_t> histogram;  // index k holds class k + 1
  double ratio = 0.0;                  // largest share / smallest share (inf if a class is absent)
};

// Fails when a class is absent or the largest class share exceeds the
// smallest by more than `tolerance` times.
inline BalanceReport class_balance_check(std::span<const int> labels, int classes, double tolerance = 5.0) {
  if (labels.size() < static_cast<std::size_t>(classes)) {
    throw std::invalid_argument("class_balance_check: need at least C labels");
  }
  BalanceReport r;
  r.histogram.assign(static_cast<std::size_t>(classes), 0);
  for (int y : labels) {
    if (y < 1 || y > classes) throw std::out_of_range("class_balance_check: label");
    ++r.histogram[static_cast<std::size_t>(y - 1)];
  }
  const auto [lo, hi] = std::minmax_element(r.histogram.begin(), r.histogram.end());
  if (*lo == 0) {
    r.ratio = std::numeric_limits<double>::infinity();
    r.passed = false;
    return r;
  }
  r.ratio = static_cast<double>(*hi) / static_cast<double>(*lo);
  r.passed = r.ratio <= tolerance;
  return r;
}

enum class AugmentMode { synthetic_pl, lf_pl };

inline AugmentMode parse_augment_mode(const std::string& s) {
  if (s == "synthetic_pl") return AugmentMode::synthetic_pl;
  if (s == "lf_pl") return AugmentMode::lf_pl;
  throw std::invalid_argument("unknown augmentation mode '" + s + "' (expected synthetic_pl or lf_pl)");
}

inline std::string to_string(AugmentMode m) { return m == AugmentMode::synthetic_pl ? "synthetic_pl" : "lf_pl"; }

// Maps generated feature rows (n x d, row-major) to their LF votes.
using LfApplicator = std::function<ws::LabelMatrix(std::span<const double> features, std::size_t n)>;

struct AugmentResult {
  Dataset data;  // base rows followed by the appended synthetic rows
  std::size_t appended = 0;
  std::size_t lf_labelled = 0;  // appended samples labelled through LF votes
  BalanceReport balance;
  bool accepted = false;
  std::string message;
};

// Appends n_synth generated samples labelled with crisp pseudolabels:
// F1(Q(x~)) for synthetic_pl; for lf_pl the applicator's votes go through the
// A-weighted label model and samples without a vote fall back to F1(Q(x~)),
// the same routing as predict_pseudolabels. The appended labels must pass
// class_balance_check, else the base dataset is returned unchanged and
// accepted is false.
inline AugmentResult augment_dataset(const ModelBundle& b, const Dataset& base, std::size_t n_synth,
                                     AugmentMode mode, const LfApplicator& lf_applicator, std::uint64_t seed,
                                     double balance_tolerance = 5.0) {
  AugmentResult r;
  r.data = base;
  if (n_synth == 0) {
    r.accepted = true;
    r.message = "nothing to append";
    return r;
  }
  if (mode == AugmentMode::lf_pl && !lf_applicator) {
    throw std::invalid_argument("augment_dataset: lf_pl mode requires an LF applicator");
  }
  const int classes = static_cast<int>(b.dims.classes);
  const auto s = generate_samples(b, n_synth, CodeSpec{}, seed);
  const Tensor x(s.n, s.dim, s.features);
  std::optional<ws::LabelMatrix> votes;
  if (mode == AugmentMode::lf_pl) votes = lf_applicator(s.features, s.n);
  const auto pl = predict_pseudolabels(b, x, votes ? &*votes : nullptr);
  r.lf_labelled = pl.table.covered_count();
  const auto labels = pl.table.crisp_labels();
  if (labels.size() < static_cast<std::size_t>(classes)) {
    r.message = "too few synthetic samples for the balance check";
    r.balance.histogram.assign(static_cast<std::size_t>(classes), 0);
    return r;
  }
  r.balance = class_balance_check(labels, classes, balance_tolerance);
  if (!r.balance.passed) {
    r.message = "class balance check failed; augmentation rejected";
    return r;
  }
  r.data.features.insert(r.data.features.end(), s.features.begin(), s.features.end());
  r.data.labels.insert(r.data.labels.end(), labels.begin(), labels.end());
  r.data.n += labels.size();
  r.appended = labels.size();
  r.accepted = true;
  r.message = "ok";
  return r;
}

// ---- checkpoints ----------------------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json checkpoint_json(const ModelBundle& b, const TrainingConfig& cfg) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, t] : b.named_params()) {
    params[name] = {{"rows", t.rows()}, {"cols", t.cols()}, {"values", std::vector<double>(t.values().begin(), t.values().end())}};
  }
  return {{"format", "wsgan-checkpoint"},
          {"version", kCheckpointVersion},
          {"mode", to_string(b.mode)},
          {"dims",
           {{"data_dim", b.dims.data_dim},
            {"classes", b.dims.classes},
            {"lfs", b.dims.lfs},
            {"z_dim", b.dims.z_dim},
            {"hidden", b.dims.hidden}}},
          {"config", to_json(cfg)},
          {"rng_state", b.rng_state},
          {"params", params}};
}

inline ModelBundle bundle_from_checkpoint(const nlohmann::json& j) {
  if (j.value("format", "") != "wsgan-checkpoint") throw std::runtime_error("checkpoint: unknown format");
  if (j.at("version").get<int>() != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + j.at("version").dump());
  }
  const auto& d = j.at("dims");
  Dims dims{d.at("data_dim").get<std::size_t>(), d.at("classes").get<std::size_t>(), d.at("lfs").get<std::size_t>(),
            d.at("z_dim").get<std::size_t>(), d.at("hidden").get<std::size_t>()};
  Rng scratch(0);
  auto b = ModelBundle::init(dims, parse_mode(j.at("mode").get<std::string>()), scratch);
  for (auto& [name, t] : b.named_params()) {
    const auto& p = j.at("params").at(name);
    const auto values = p.at("values").get<std::vector<double>>();
    if (p.at("rows").get<std::size_t>() != t.rows() || p.at("cols").get<std::size_t>() != t.cols() ||
        values.size() != t.size()) {
      throw std::runtime_error("checkpoint: shape mismatch for " + name);
    }
    std::copy(values.begin(), values.end(), t.mutable_values().begin());
  }
  b.rng_state = j.value("rng_state", "");
  return b;
}

}  // namespace wsgan::gan
