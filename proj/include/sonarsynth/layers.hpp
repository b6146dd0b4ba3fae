#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sonarsynth/rng.hpp"
#include "sonarsynth/tensor.hpp"

namespace sonarsynth {

struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
};

enum class PadMode { zero, reflect };

// Caffe-style layers: forward caches whatever backward needs, backward
// returns the input gradient and accumulates parameter gradients. A layer's
// backward must follow its own most recent forward.
class Layer {
public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x) = 0;
  virtual Tensor backward(const Tensor& dy) = 0;
  virtual void collect_params(std::vector<Param*>& out) { (void)out; }
  virtual void init(Rng& rng) { (void)rng; }
};

// --------------------------------------------------------------------------
// im2col machinery shared by the conv layers and tests
// --------------------------------------------------------------------------

int conv_out_size(int in, int k, int stride, int pad);

// col is {C*k*k, out_h*out_w}
void im2col(const Tensor& x, int k, int stride, int pad, PadMode mode,
            Tensor& col);
// adjoint of im2col: scatter-adds col into x (x must be pre-zeroed by caller
// or hold a running gradient)
void col2im(const Tensor& col, int k, int stride, int pad, PadMode mode,
            Tensor& x);

// --------------------------------------------------------------------------

class Conv2d : public Layer {
public:
  Conv2d(int in_ch, int out_ch, int ksize, int stride, int pad, PadMode mode);

  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  void collect_params(std::vector<Param*>& out) override;
  void init(Rng& rng) override;

  Param weight;  // {out_ch, in_ch, k, k}
  Param bias;    // {out_ch}

private:
  int in_ch_, out_ch_, k_, stride_, pad_;
  PadMode mode_;
  Tensor col_;  // cached im2col of the last input
  int in_h_ = 0, in_w_ = 0;
};

// Fractionally strided convolution; out = (in-1)*stride - 2*pad + k + out_pad.
class ConvTranspose2d : public Layer {
public:
  ConvTranspose2d(int in_ch, int out_ch, int ksize, int stride, int pad,
                  int out_pad);

  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  void collect_params(std::vector<Param*>& out) override;
  void init(Rng& rng) override;

  Param weight;  // {in_ch, out_ch, k, k}
  Param bias;    // {out_ch}

private:
  int in_ch_, out_ch_, k_, stride_, pad_, out_pad_;
  Tensor x_;  // cached input (needed for the weight gradient)
};

// Per-channel normalization over H*W with learned affine. eps is kept tiny so
// the normalized activations carry unit variance to high accuracy.
class InstanceNorm : public Layer {
public:
  explicit InstanceNorm(int channels, double eps = 1e-9);

  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  void collect_params(std::vector<Param*>& out) override;

  Param gamma;  // {C}, init 1
  Param beta;   // {C}, init 0

private:
  int channels_;
  double eps_;
  Tensor xhat_;
  std::vector<double> inv_std_;
};

class ReLU : public Layer {
public:
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;

private:
  Tensor y_;
};

class Sigmoid : public Layer {
public:
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;

private:
  Tensor y_;
};

class MaxPool2d : public Layer {
public:
  MaxPool2d(int ksize, int stride, int pad);

  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;

private:
  int k_, stride_, pad_;
  std::vector<int> argmax_;
  std::vector<int> in_shape_;
};

class Flatten : public Layer {
public:
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;

private:
  std::vector<int> in_shape_;
};

class Linear : public Layer {
public:
  Linear(int in_dim, int out_dim);

  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  void collect_params(std::vector<Param*>& out) override;
  void init(Rng& rng) override;

  Param weight;  // {out, in}
  Param bias;    // {out}

private:
  int in_dim_, out_dim_;
  Tensor x_;
};

class Softmax : public Layer {
public:
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;

private:
  Tensor y_;
};

// --------------------------------------------------------------------------

class Sequential : public Layer {
public:
  template <class L, class... Args>
  L* emplace(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L* raw = layer.get();
    layers_.push_back(std::move(layer));
    return raw;
  }

  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy) override;
  void collect_params(std::vector<Param*>& out) override;
  void init(Rng& rng) override;

  std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }

private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

// Uniform init with variance 1/fan_in (bound sqrt(3/fan_in)).
void fan_in_uniform(Tensor& w, int fan_in, Rng& rng);

}  // namespace sonarsynth
