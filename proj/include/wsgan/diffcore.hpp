#pragma once

// Minimal reverse-mode automatic differentiation over dense row-major
// matrices of doubles. Scalars are 1x1, vectors are 1xn.
//
// Graphs are built by running ordinary code ("define by run"). Every op
// whose inputs require gradients records its parents and a backward rule;
// everything else is evaluated eagerly and kept graph-free.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace wsgan::diff {

// Raised when a forward value or a gradient stops being finite.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct Node {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

// Replays detached values during finite-difference probing so that the
// numeric oracle sees the same stop-gradient structure as reverse mode.
struct DetachTape {
  enum class Mode { off, record, replay };
  Mode mode = Mode::off;
  std::vector<std::vector<double>> values;
  std::size_t cursor = 0;
};

inline DetachTape& detach_tape() {
  thread_local DetachTape tape;
  return tape;
}

inline void check_finite(const Node& node) {
  for (double v : node.value) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value produced by ") +
                         node.op);
    }
  }
}

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  Tensor(std::size_t rows, std::size_t cols, std::vector<double> values,
         bool requires_grad = false)
      : node_(std::make_shared<detail::Node>()) {
    if (values.size() != rows * cols) {
      throw std::invalid_argument("Tensor: value count does not match shape");
    }
    node_->rows = rows;
    node_->cols = cols;
    node_->value = std::move(values);
    node_->requires_grad = requires_grad;
    detail::check_finite(*node_);
  }

  static Tensor zeros(std::size_t rows, std::size_t cols,
                      bool requires_grad = false) {
    return Tensor(rows, cols, std::vector<double>(rows * cols, 0.0),
                  requires_grad);
  }

  static Tensor full(std::size_t rows, std::size_t cols, double v,
                     bool requires_grad = false) {
    return Tensor(rows, cols, std::vector<double>(rows * cols, v),
                  requires_grad);
  }

  static Tensor scalar(double v, bool requires_grad = false) {
    return Tensor(1, 1, {v}, requires_grad);
  }

  bool defined() const { return node_ != nullptr; }
  std::size_t rows() const { return node_->rows; }
  std::size_t cols() const { return node_->cols; }
  std::size_t size() const { return node_->value.size(); }
  std::vector<std::size_t> shape() const { return {rows(), cols()}; }
  bool requires_grad() const { return node_->requires_grad; }
  const char* op() const { return node_->op; }

  double operator()(std::size_t r, std::size_t c) const {
    return node_->value[r * node_->cols + c];
  }
  double item() const {
    if (size() != 1) throw std::invalid_argument("item: tensor is not scalar");
    return node_->value[0];
  }

  std::span<const double> values() const { return node_->value; }
  // Mutable access is meant for leaves (parameters, optimizer updates).
  std::span<double> mutable_values() { return node_->value; }
  std::vector<double> row(std::size_t r) const {
    auto begin = node_->value.begin() + static_cast<std::ptrdiff_t>(r * cols());
    return {begin, begin + static_cast<std::ptrdiff_t>(cols())};
  }

  // Empty until a backward pass reaches this tensor.
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  void zero_grad() { node_->grad.assign(node_->value.size(), 0.0); }

  // Copies values into a fresh leaf that does not require gradients.
  Tensor clone() const {
    return Tensor(rows(), cols(), node_->value, false);
  }

  void backward() const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& shared() const { return node_; }

 private:
  friend Tensor make_result(std::size_t, std::size_t, std::vector<double>,
                            const char*, std::vector<Tensor>,
                            std::function<void(detail::Node&)>);
  std::shared_ptr<detail::Node> node_;
};

// Builds an op result. Parents and the backward rule are only retained when
// some input requires gradients.
inline Tensor make_result(std::size_t rows, std::size_t cols,
                          std::vector<double> values, const char* op,
                          std::vector<Tensor> inputs,
                          std::function<void(detail::Node&)> backward_fn) {
  Tensor out;
  out.node_ = std::make_shared<detail::Node>();
  auto& n = *out.node_;
  n.rows = rows;
  n.cols = cols;
  n.value = std::move(values);
  n.op = op;
  detail::check_finite(n);
  const bool any = std::any_of(inputs.begin(), inputs.end(),
                               [](const Tensor& t) { return t.requires_grad(); });
  if (any) {
    n.requires_grad = true;
    for (auto& t : inputs) n.parents.push_back(t.shared());
    n.backward_fn = std::move(backward_fn);
  }
  return out;
}

namespace detail {

inline void require_same_shape(const Tensor& a, const Tensor& b,
                               const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

// b may be the same shape as a, a single row broadcast over a's rows, or a
// scalar broadcast everywhere.
enum class Broadcast { none, row, scalar };

inline Broadcast broadcast_kind(const Tensor& a, const Tensor& b,
                                const char* op) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Broadcast::none;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::row;
  if (b.size() == 1) return Broadcast::scalar;
  throw std::invalid_argument(std::string(op) + ": cannot broadcast operand");
}

inline std::size_t bindex(Broadcast kind, std::size_t i, std::size_t cols) {
  switch (kind) {
    case Broadcast::none:
      return i;
    case Broadcast::row:
      return i % cols;
    case Broadcast::scalar:
      return 0;
  }
  return 0;
}

template <typename Fwd, typename Dfdx>
Tensor unary(const Tensor& a, const char* op, Fwd fwd, Dfdx dfdx) {
  std::vector<double> out(a.size());
  const auto in = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(in[i]);
  return make_result(a.rows(), a.cols(), std::move(out), op, {a},
                     [dfdx](Node& self) {
                       Node& p = *self.parents[0];
                       if (!p.requires_grad) return;
                       p.ensure_grad();
                       for (std::size_t i = 0; i < self.value.size(); ++i) {
                         p.grad[i] += self.grad[i] * dfdx(p.value[i], self.value[i]);
                       }
                     });
}

}  // namespace detail

// ---- arithmetic ---------------------------------------------------------

inline Tensor add(const Tensor& a, const Tensor& b) {
  const auto kind = detail::broadcast_kind(a, b, "add");
  std::vector<double> out(a.size());
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = av[i] + bv[detail::bindex(kind, i, a.cols())];
  }
  return make_result(a.rows(), a.cols(), std::move(out), "add", {a, b},
                     [kind](detail::Node& self) {
                       auto& pa = *self.parents[0];
                       auto& pb = *self.parents[1];
                       if (pa.requires_grad) {
                         pa.ensure_grad();
                         for (std::size_t i = 0; i < self.grad.size(); ++i) pa.grad[i] += self.grad[i];
                       }
                       if (pb.requires_grad) {
                         pb.ensure_grad();
                         for (std::size_t i = 0; i < self.grad.size(); ++i) {
                           pb.grad[detail::bindex(kind, i, self.cols)] += self.grad[i];
                         }
                       }
                     });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  const auto kind = detail::broadcast_kind(a, b, "sub");
  std::vector<double> out(a.size());
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = av[i] - bv[detail::bindex(kind, i, a.cols())];
  }
  return make_result(a.rows(), a.cols(), std::move(out), "sub", {a, b},
                     [kind](detail::Node& self) {
                       auto& pa = *self.parents[0];
                       auto& pb = *self.parents[1];
                       if (pa.requires_grad) {
                         pa.ensure_grad();
                         for (std::size_t i = 0; i < self.grad.size(); ++i) pa.grad[i] += self.grad[i];
                       }
                       if (pb.requires_grad) {
                         pb.ensure_grad();
                         for (std::size_t i = 0; i < self.grad.size(); ++i) {
                           pb.grad[detail::bindex(kind, i, self.cols)] -= self.grad[i];
                         }
                       }
                     });
}

// Elementwise product with the same broadcasting rules as add.
inline Tensor mul(const Tensor& a, const Tensor& b) {
  const auto kind = detail::broadcast_kind(a, b, "mul");
  std::vector<double> out(a.size());
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = av[i] * bv[detail::bindex(kind, i, a.cols())];
  }
  return make_result(a.rows(), a.cols(), std::move(out), "mul", {a, b},
                     [kind](detail::Node& self) {
                       auto& pa = *self.parents[0];
                       auto& pb = *self.parents[1];
                       for (std::size_t i = 0; i < self.grad.size(); ++i) {
                         const std::size_t j = detail::bindex(kind, i, self.cols);
                         if (pa.requires_grad) {
                           pa.ensure_grad();
                           pa.grad[i] += self.grad[i] * pb.value[j];
                         }
                         if (pb.requires_grad) {
                           pb.ensure_grad();
                           pb.grad[j] += self.grad[i] * pa.value[i];
                         }
                       }
                     });
}

inline Tensor scale(const Tensor& a, double k) {
  return detail::unary(
      a, "scale", [k](double x) { return k * x; },
      [k](double, double) { return k; });
}

inline Tensor add_scalar(const Tensor& a, double k) {
  return detail::unary(
      a, "add_scalar", [k](double x) { return x + k; },
      [](double, double) { return 1.0; });
}

inline Tensor square(const Tensor& a) {
  return detail::unary(
      a, "square", [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions differ");
  }
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  std::vector<double> out(n * m, 0.0);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = out.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      const double* brow = bv.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  }
  return make_result(n, m, std::move(out), "matmul", {a, b},
                     [n, k, m](detail::Node& self) {
                       auto& pa = *self.parents[0];
                       auto& pb = *self.parents[1];
                       const double* g = self.grad.data();
                       if (pa.requires_grad) {
                         pa.ensure_grad();
                         // dA = G * B^T
                         for (std::size_t i = 0; i < n; ++i) {
                           for (std::size_t p = 0; p < k; ++p) {
                             double acc = 0.0;
                             const double* brow = pb.value.data() + p * m;
                             const double* grow = g + i * m;
                             for (std::size_t j = 0; j < m; ++j) acc += grow[j] * brow[j];
                             pa.grad[i * k + p] += acc;
                           }
                         }
                       }
                       if (pb.requires_grad) {
                         pb.ensure_grad();
                         // dB = A^T * G
                         for (std::size_t i = 0; i < n; ++i) {
                           const double* grow = g + i * m;
                           for (std::size_t p = 0; p < k; ++p) {
                             const double aip = pa.value[i * k + p];
                             double* gbrow = pb.grad.data() + p * m;
                             for (std::size_t j = 0; j < m; ++j) gbrow[j] += aip * grow[j];
                           }
                         }
                       }
                     });
}

// ---- activations ----------------------------------------------------------

inline Tensor relu(const Tensor& a) {
  return detail::unary(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

inline double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline Tensor sigmoid(const Tensor& a) {
  return detail::unary(
      a, "sigmoid", [](double x) { return stable_sigmoid(x); },
      [](double, double y) { return y * (1.0 - y); });
}

inline Tensor tanh(const Tensor& a) {
  return detail::unary(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

inline Tensor exp(const Tensor& a) {
  return detail::unary(
      a, "exp", [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

inline Tensor log(const Tensor& a) {
  return detail::unary(
      a, "log", [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

// log(clamp(x, lo, hi)); the derivative is zero where the clamp is active.
inline Tensor clamped_log(const Tensor& a, double lo, double hi) {
  return detail::unary(
      a, "clamped_log",
      [lo, hi](double x) { return std::log(std::clamp(x, lo, hi)); },
      [lo, hi](double x, double) { return (x < lo || x > hi) ? 0.0 : 1.0 / x; });
}

// Row-wise softmax, max-shifted.
inline Tensor softmax(const Tensor& a) {
  const std::size_t n = a.rows(), c = a.cols();
  std::vector<double> out(a.size());
  const auto av = a.values();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = av.data() + i * c;
    const double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      out[i * c + j] = std::exp(row[j] - mx);
      z += out[i * c + j];
    }
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= z;
  }
  return make_result(n, c, std::move(out), "softmax", {a},
                     [n, c](detail::Node& self) {
                       auto& p = *self.parents[0];
                       if (!p.requires_grad) return;
                       p.ensure_grad();
                       for (std::size_t i = 0; i < n; ++i) {
                         const double* y = self.value.data() + i * c;
                         const double* g = self.grad.data() + i * c;
                         double dot = 0.0;
                         for (std::size_t j = 0; j < c; ++j) dot += y[j] * g[j];
                         for (std::size_t j = 0; j < c; ++j) p.grad[i * c + j] += y[j] * (g[j] - dot);
                       }
                     });
}

// Row-wise log-softmax via log-sum-exp.
inline Tensor log_softmax(const Tensor& a) {
  const std::size_t n = a.rows(), c = a.cols();
  std::vector<double> out(a.size());
  const auto av = a.values();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = av.data() + i * c;
    const double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] = row[j] - lse;
  }
  return make_result(n, c, std::move(out), "log_softmax", {a},
                     [n, c](detail::Node& self) {
                       auto& p = *self.parents[0];
                       if (!p.requires_grad) return;
                       p.ensure_grad();
                       for (std::size_t i = 0; i < n; ++i) {
                         const double* y = self.value.data() + i * c;
                         const double* g = self.grad.data() + i * c;
                         double gsum = 0.0;
                         for (std::size_t j = 0; j < c; ++j) gsum += g[j];
                         for (std::size_t j = 0; j < c; ++j) {
                           p.grad[i * c + j] += g[j] - std::exp(y[j]) * gsum;
                         }
                       }
                     });
}

// ---- reductions and reshaping ---------------------------------------------

inline Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return make_result(1, 1, {s}, "sum", {a}, [](detail::Node& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (double& g : p.grad) g += self.grad[0];
  });
}

inline Tensor mean(const Tensor& a) {
  if (a.size() == 0) throw std::invalid_argument("mean: empty tensor");
  const double inv = 1.0 / static_cast<double>(a.size());
  double s = 0.0;
  for (double v : a.values()) s += v;
  return make_result(1, 1, {s * inv}, "mean", {a}, [inv](detail::Node& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (double& g : p.grad) g += self.grad[0] * inv;
  });
}

// Sums each row: (n x c) -> (n x 1).
inline Tensor row_sum(const Tensor& a) {
  const std::size_t n = a.rows(), c = a.cols();
  std::vector<double> out(n, 0.0);
  const auto av = a.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[i] += av[i * c + j];
  }
  return make_result(n, 1, std::move(out), "row_sum", {a},
                     [c](detail::Node& self) {
                       auto& p = *self.parents[0];
                       if (!p.requires_grad) return;
                       p.ensure_grad();
                       for (std::size_t i = 0; i < p.grad.size(); ++i) p.grad[i] += self.grad[i / c];
                     });
}

// Horizontal concatenation: (n x a) ++ (n x b) -> (n x (a+b)).
inline Tensor concat(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("concat: row mismatch");
  const std::size_t n = a.rows(), ca = a.cols(), cb = b.cols(), c = ca + cb;
  std::vector<double> out(n * c);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(av.data() + i * ca, ca, out.data() + i * c);
    std::copy_n(bv.data() + i * cb, cb, out.data() + i * c + ca);
  }
  return make_result(n, c, std::move(out), "concat", {a, b},
                     [n, ca, cb, c](detail::Node& self) {
                       auto& pa = *self.parents[0];
                       auto& pb = *self.parents[1];
                       if (pa.requires_grad) pa.ensure_grad();
                       if (pb.requires_grad) pb.ensure_grad();
                       for (std::size_t i = 0; i < n; ++i) {
                         for (std::size_t j = 0; j < ca; ++j) {
                           if (pa.requires_grad) pa.grad[i * ca + j] += self.grad[i * c + j];
                         }
                         for (std::size_t j = 0; j < cb; ++j) {
                           if (pb.requires_grad) pb.grad[i * cb + j] += self.grad[i * c + ca + j];
                         }
                       }
                     });
}

// Selects rows by index (duplicates allowed).
inline Tensor gather_rows(const Tensor& a, std::span<const std::size_t> index) {
  const std::size_t c = a.cols();
  std::vector<double> out(index.size() * c);
  const auto av = a.values();
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= a.rows()) throw std::out_of_range("gather_rows: index");
    std::copy_n(av.data() + index[r] * c, c, out.data() + r * c);
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return make_result(index.size(), c, std::move(out), "gather_rows", {a},
                     [idx = std::move(idx), c](detail::Node& self) {
                       auto& p = *self.parents[0];
                       if (!p.requires_grad) return;
                       p.ensure_grad();
                       for (std::size_t r = 0; r < idx.size(); ++r) {
                         for (std::size_t j = 0; j < c; ++j) p.grad[idx[r] * c + j] += self.grad[r * c + j];
                       }
                     });
}

// Class scores of a weighted vote: score(i, k) = sum_j w(i, j) [votes(i, j) == k + 1].
// weights is (n x m) or a single (1 x m) row shared by all samples; votes use
// 0 for abstain and 1..classes for class ids.
inline Tensor weighted_votes(const Tensor& weights, std::span<const int> votes,
                             std::size_t n, std::size_t m, std::size_t classes) {
  if (weights.cols() != m || (weights.rows() != n && weights.rows() != 1)) {
    throw std::invalid_argument("weighted_votes: weight shape");
  }
  if (votes.size() != n * m) throw std::invalid_argument("weighted_votes: vote count");
  const bool shared = weights.rows() == 1 && n != 1;
  std::vector<double> out(n * classes, 0.0);
  const auto wv = weights.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const int v = votes[i * m + j];
      if (v < 0 || static_cast<std::size_t>(v) > classes) {
        throw std::out_of_range("weighted_votes: vote out of range");
      }
      if (v == 0) continue;
      out[i * classes + static_cast<std::size_t>(v - 1)] += wv[shared ? j : i * m + j];
    }
  }
  std::vector<int> vv(votes.begin(), votes.end());
  return make_result(n, classes, std::move(out), "weighted_votes", {weights},
                     [vv = std::move(vv), n, m, classes, shared](detail::Node& self) {
                       auto& p = *self.parents[0];
                       if (!p.requires_grad) return;
                       p.ensure_grad();
                       for (std::size_t i = 0; i < n; ++i) {
                         for (std::size_t j = 0; j < m; ++j) {
                           const int v = vv[i * m + j];
                           if (v == 0) continue;
                           p.grad[shared ? j : i * m + j] +=
                               self.grad[i * classes + static_cast<std::size_t>(v - 1)];
                         }
                       }
                     });
}

// Cuts gradient flow: the result is a constant leaf holding a's values.
inline Tensor detach(const Tensor& a) {
  auto& tape = detail::detach_tape();
  if (tape.mode == detail::DetachTape::Mode::replay) {
    if (tape.cursor >= tape.values.size() ||
        tape.values[tape.cursor].size() != a.size()) {
      throw std::logic_error("detach replay: graph structure changed");
    }
    return Tensor(a.rows(), a.cols(), tape.values[tape.cursor++], false);
  }
  if (tape.mode == detail::DetachTape::Mode::record) {
    tape.values.emplace_back(a.values().begin(), a.values().end());
  }
  Tensor out(a.rows(), a.cols(), {a.values().begin(), a.values().end()}, false);
  return out;
}

// ---- backward ------------------------------------------------------------

// Reverse-mode pass from a scalar. Interior gradients are recomputed from
// scratch; leaf gradients accumulate, so callers zero them between steps.
inline void Tensor::backward() const {
  if (!defined() || size() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar tensor");
  }
  if (!requires_grad()) return;

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (detail::Node* n : order) {
    detail::check_finite(*n);
    if (!n->parents.empty()) n->grad.assign(n->value.size(), 0.0);
    else n->ensure_grad();
  }
  node_->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    if (n->backward_fn) n->backward_fn(*n);
  }
  for (detail::Node* n : order) {
    for (double g : n->grad) {
      if (!std::isfinite(g)) {
        throw NumericError(std::string("non-finite gradient at ") + n->op);
      }
    }
  }
}

inline void backward(const Tensor& loss) { loss.backward(); }

// ---- gradient checking ----------------------------------------------------

struct GradCheckReport {
  std::vector<double> analytic;
  std::vector<double> numeric;
  std::vector<double> relative_error;
  double max_relative_error = 0.0;
};

inline double relative_error(double analytic, double numeric,
                             double abs_floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), abs_floor});
  return std::abs(analytic - numeric) / scale;
}

// Compares reverse-mode gradients of fn with respect to every element of
// params against central differences. detach() calls inside fn are replayed
// with their unperturbed values while probing, so the numeric derivative is
// taken of the same stop-gradient surrogate that reverse mode differentiates.
//
// The relative error of a coordinate is |a - n| / max(|a|, |n|, abs_floor).
inline GradCheckReport check_gradients(const std::function<Tensor()>& fn,
                                       std::vector<Tensor> params,
                                       double step = 1e-5,
                                       double abs_floor = 1e-6) {
  if (!(step > 0.0)) throw std::invalid_argument("check_gradients: step must be positive");
  auto& tape = detail::detach_tape();
  struct TapeReset {
    detail::DetachTape& t;
    ~TapeReset() {
      t.mode = detail::DetachTape::Mode::off;
      t.values.clear();
      t.cursor = 0;
    }
  } reset{tape};

  tape.values.clear();
  tape.mode = detail::DetachTape::Mode::record;
  for (auto& p : params) p.zero_grad();
  Tensor loss = fn();
  tape.mode = detail::DetachTape::Mode::off;
  loss.backward();

  GradCheckReport report;
  for (auto& p : params) {
    const auto g = p.grad();
    report.analytic.insert(report.analytic.end(), g.begin(), g.end());
  }

  auto evaluate = [&]() {
    tape.mode = detail::DetachTape::Mode::replay;
    tape.cursor = 0;
    const double v = fn().item();
    tape.mode = detail::DetachTape::Mode::off;
    if (!std::isfinite(v)) {
      throw NumericError("check_gradients: function non-finite at probe point");
    }
    return v;
  };

  for (auto& p : params) {
    auto values = p.mutable_values();
    for (double& x : values) {
      const double saved = x;
      x = saved + step;
      const double up = evaluate();
      x = saved - step;
      const double down = evaluate();
      x = saved;
      report.numeric.push_back((up - down) / (2.0 * step));
    }
  }

  for (std::size_t i = 0; i < report.analytic.size(); ++i) {
    const double e = relative_error(report.analytic[i], report.numeric[i], abs_floor);
    report.relative_error.push_back(e);
    report.max_relative_error = std::max(report.max_relative_error, e);
  }
  return report;
}

}  // namespace wsgan::diff
