#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "wsgan/diffcore.hpp"

namespace wsgan {

// Feature matrix plus ground-truth class ids (1..classes). The labels are
// only ever read by evaluation code.
struct Dataset {
  std::size_t n = 0;
  std::size_t dim = 0;
  int classes = 0;
  std::vector<double> features;  // row-major n x dim
  std::vector<int> labels;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim, dim);
  }

  void validate() const {
    if (features.size() != n * dim || labels.size() != n) {
      throw std::invalid_argument("Dataset: inconsistent sizes");
    }
    for (int y : labels) {
      if (y < 1 || y > classes) throw std::invalid_argument("Dataset: label out of range");
    }
  }

  diff::Tensor tensor() const { return diff::Tensor(n, dim, features); }

  diff::Tensor rows(std::span<const std::size_t> index) const {
    std::vector<double> v;
    v.reserve(index.size() * dim);
    for (std::size_t i : index) {
      const auto r = row(i);
      v.insert(v.end(), r.begin(), r.end());
    }
    return diff::Tensor(index.size(), dim, std::move(v));
  }
};

}  // namespace wsgan
