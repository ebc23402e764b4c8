#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "wsgan/diffcore.hpp"

namespace wsgan::diff {

// Per-parameter Adam moments. Moments are laid out in the order of the
// parameter list the state was created for.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;

  AdamState() = default;
  AdamState(std::span<const Tensor> params, double b1 = 0.9, double b2 = 0.999,
            double e = 1e-8)
      : beta1(b1), beta2(b2), eps(e) {
    for (const auto& p : params) {
      first.emplace_back(p.size(), 0.0);
      second.emplace_back(p.size(), 0.0);
    }
  }
};

// One bias-corrected Adam update of params in place, reading each
// parameter's accumulated gradient.
inline void adam_step(std::span<Tensor> params, AdamState& state, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("adam_step: lr must be positive");
  if (params.size() != state.first.size()) {
    throw std::invalid_argument("adam_step: parameter count differs from state");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].size() != state.first[k].size()) {
      throw std::invalid_argument("adam_step: parameter shape differs from state");
    }
    for (double g : params[k].grad()) {
      if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k].mutable_values();
    const auto grad = params[k].grad();
    auto& m = state.first[k];
    auto& v = state.second[k];
    for (std::size_t i = 0; i < values.size(); ++i) {
      // A parameter never reached by backward has no gradient buffer.
      const double g = grad.empty() ? 0.0 : grad[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      values[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

// Parameter list + state + learning rate.
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Tensor> params, double lr)
      : params_(std::move(params)), state_(params_), lr_(lr) {}

  void zero_grad() {
    for (auto& p : params_) p.zero_grad();
  }
  void step() { adam_step(params_, state_, lr_); }

  double lr() const { return lr_; }
  const AdamState& state() const { return state_; }
  AdamState& state() { return state_; }
  const std::vector<Tensor>& params() const { return params_; }

 private:
  std::vector<Tensor> params_;
  AdamState state_;
  double lr_ = 1e-3;
};

}  // namespace wsgan::diff
