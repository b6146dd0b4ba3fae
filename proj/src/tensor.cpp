#include "sonarsynth/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sonarsynth {

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  std::size_t n = 1;
  for (int d : shape_) {
    if (d <= 0) throw std::invalid_argument("Tensor: dims must be positive");
    n *= static_cast<std::size_t>(d);
  }
  data_.assign(n, 0.0);
}

Tensor Tensor::full(std::vector<int> shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

std::string Tensor::shape_str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void Tensor::add_scaled(const Tensor& other, double alpha) {
  if (!same_shape(other)) throw std::invalid_argument("add_scaled: shape mismatch");
  const double* src = other.data();
  double* dst = data();
  const std::size_t n = numel();
  for (std::size_t i = 0; i < n; ++i) dst[i] += alpha * src[i];
}

void Tensor::scale(double alpha) {
  for (double& v : data_) v *= alpha;
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace sonarsynth
