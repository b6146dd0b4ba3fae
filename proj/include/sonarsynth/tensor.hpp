#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace sonarsynth {

// Dense row-major double tensor, 1-4 dims. Feature maps are {C, H, W},
// conv weights {Cout, Cin, K, K}, matrices {M, N}.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int> shape, double value);

  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  const std::vector<int>& shape() const { return shape_; }
  std::size_t numel() const { return data_.size(); }
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string shape_str() const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(int i, int j) {
    assert(ndim() == 2);
    return data_[static_cast<std::size_t>(i) * shape_[1] + j];
  }
  double at(int i, int j) const {
    assert(ndim() == 2);
    return data_[static_cast<std::size_t>(i) * shape_[1] + j];
  }
  double& at(int c, int y, int x) {
    assert(ndim() == 3);
    return data_[(static_cast<std::size_t>(c) * shape_[1] + y) * shape_[2] + x];
  }
  double at(int c, int y, int x) const {
    assert(ndim() == 3);
    return data_[(static_cast<std::size_t>(c) * shape_[1] + y) * shape_[2] + x];
  }
  double& at(int o, int c, int y, int x) {
    assert(ndim() == 4);
    return data_[((static_cast<std::size_t>(o) * shape_[1] + c) * shape_[2] + y) *
                     shape_[3] +
                 x];
  }

  void fill(double value);
  void zero() { fill(0.0); }

  // this += alpha * other (shapes must match)
  void add_scaled(const Tensor& other, double alpha);
  void scale(double alpha);

  bool all_finite() const;

private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

// Feature maps are plain 3-D tensors {channels, height, width}.
using FeatureMap = Tensor;

}  // namespace sonarsynth
