#pragma once

#include <cmath>
#include <vector>

#include "wsgan/diffcore.hpp"
#include "wsgan/rng.hpp"

namespace wsgan::diff {

// Affine map x W + b with W (in x out) and b (1 x out).
struct Linear {
  Tensor weight;
  Tensor bias;

  Linear() = default;

  // Xavier-uniform weights, zero bias. Draws in*out uniforms, row-major.
  Linear(std::size_t in, std::size_t out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::vector<double> w(in * out);
    for (double& x : w) x = rng.uniform(-limit, limit);
    weight = Tensor(in, out, std::move(w), true);
    bias = Tensor::zeros(1, out, true);
  }

  Tensor operator()(const Tensor& x) const { return add(matmul(x, weight), bias); }

  std::size_t in() const { return weight.rows(); }
  std::size_t out() const { return weight.cols(); }
  std::vector<Tensor> params() const { return {weight, bias}; }
};

inline void append(std::vector<Tensor>& dst, const std::vector<Tensor>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

inline Tensor one_hot(std::span<const int> labels, std::size_t classes) {
  std::vector<double> v(labels.size() * classes, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    v[i * classes + static_cast<std::size_t>(labels[i] - 1)] = 1.0;
  }
  return Tensor(labels.size(), classes, std::move(v));
}

}  // namespace wsgan::diff
