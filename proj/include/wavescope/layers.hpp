#pragma once

#include "wavescope/tensor.hpp"

#include <memory>
#include <random>
#include <vector>

namespace wavescope {

/// Per-call scratch a layer needs to run its backward pass.
struct LayerCache {
  Shape input_shape;
  Eigen::MatrixXd columns;        // im2col patches (conv)
  Eigen::VectorXd input;          // dense input / relu input
  std::vector<Index> argmax;      // max-pool routing
};

/// A differentiable layer with hand-derived gradients. Parameters live in
/// the layer; gradients are written to caller-owned buffers so several
/// workers can share one set of weights.
class Layer {
public:
  virtual ~Layer() = default;

  virtual std::string kind() const = 0;
  virtual Shape output_shape(const Shape& in) const = 0;
  virtual Tensor forward(const Tensor& x, LayerCache* cache) const = 0;

  /// Accumulates parameter gradients into `param_grads` (one per params()
  /// entry). Returns dL/dx, or an empty tensor when need_input_grad is false.
  virtual Tensor backward(const Tensor& grad_out, const LayerCache& cache,
                          std::vector<Eigen::VectorXd>& param_grads,
                          bool need_input_grad = true) const = 0;

  virtual std::vector<Eigen::VectorXd*> params() { return {}; }
  std::vector<const Eigen::VectorXd*> params() const;

  virtual std::unique_ptr<Layer> clone() const = 0;

  Index parameter_count() const;
};

// Uniform(-sqrt(1/fan_in), sqrt(1/fan_in)) weights, zero biases.
void init_uniform(Eigen::VectorXd& w, Index fan_in, std::mt19937_64& rng);

/// 1-D valid convolution in correlation orientation:
///   y[m, i] = sum_c sum_k w[m, c, k] * x[c, i*stride + k] + b[m].
class Conv1d final : public Layer {
public:
  Conv1d(Index in_channels, Index filters, Index kernel, Index stride = 1);

  std::string kind() const override { return "conv1d"; }
  Shape output_shape(const Shape& in) const override;
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& grad_out, const LayerCache& cache,
                  std::vector<Eigen::VectorXd>& param_grads, bool need_input_grad) const override;
  std::vector<Eigen::VectorXd*> params() override { return {&weights_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv1d>(*this); }

  Index in_channels() const { return in_; }
  Index filters() const { return out_; }
  Index kernel() const { return k_; }
  Index stride() const { return stride_; }

  /// filters x (in_channels * kernel)
  Eigen::Map<RowMatrixXd> weight_matrix() { return {weights_.data(), out_, in_ * k_}; }
  Eigen::Map<const RowMatrixXd> weight_matrix() const { return {weights_.data(), out_, in_ * k_}; }
  Eigen::VectorXd& bias() { return bias_; }
  const Eigen::VectorXd& bias() const { return bias_; }

  void init(std::mt19937_64& rng);

private:
  Index in_, out_, k_, stride_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd bias_;
};

/// 2-D valid convolution, stride 1, same orientation as Conv1d.
class Conv2d final : public Layer {
public:
  Conv2d(Index in_channels, Index filters, Index kh, Index kw);

  std::string kind() const override { return "conv2d"; }
  Shape output_shape(const Shape& in) const override;
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& grad_out, const LayerCache& cache,
                  std::vector<Eigen::VectorXd>& param_grads, bool need_input_grad) const override;
  std::vector<Eigen::VectorXd*> params() override { return {&weights_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2d>(*this); }

  Index in_channels() const { return in_; }
  Index filters() const { return out_; }
  Index kernel_h() const { return kh_; }
  Index kernel_w() const { return kw_; }

  Eigen::Map<RowMatrixXd> weight_matrix() { return {weights_.data(), out_, in_ * kh_ * kw_}; }
  Eigen::Map<const RowMatrixXd> weight_matrix() const { return {weights_.data(), out_, in_ * kh_ * kw_}; }
  Eigen::VectorXd& bias() { return bias_; }

  void init(std::mt19937_64& rng);

private:
  Index in_, out_, kh_, kw_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd bias_;
};

class ReLU final : public Layer {
public:
  std::string kind() const override { return "relu"; }
  Shape output_shape(const Shape& in) const override { return in; }
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& grad_out, const LayerCache& cache,
                  std::vector<Eigen::VectorXd>& param_grads, bool need_input_grad) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ReLU>(*this); }
};

/// Disjoint windows of `size` along the last axis; a trailing partial window
/// is dropped. Ties go to the earliest index.
class MaxPool1d final : public Layer {
public:
  explicit MaxPool1d(Index size);

  std::string kind() const override { return "maxpool1d"; }
  Shape output_shape(const Shape& in) const override;
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& grad_out, const LayerCache& cache,
                  std::vector<Eigen::VectorXd>& param_grads, bool need_input_grad) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool1d>(*this); }

  Index size() const { return size_; }

private:
  Index size_;
};

/// Disjoint size x size windows over (h, w) of a (c, h, w) tensor.
class MaxPool2d final : public Layer {
public:
  explicit MaxPool2d(Index size);

  std::string kind() const override { return "maxpool2d"; }
  Shape output_shape(const Shape& in) const override;
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& grad_out, const LayerCache& cache,
                  std::vector<Eigen::VectorXd>& param_grads, bool need_input_grad) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool2d>(*this); }

  Index size() const { return size_; }

private:
  Index size_;
};

/// Fully connected layer on the flattened input: y = W x + b.
class Dense final : public Layer {
public:
  Dense(Index inputs, Index outputs);

  std::string kind() const override { return "dense"; }
  Shape output_shape(const Shape& in) const override;
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& grad_out, const LayerCache& cache,
                  std::vector<Eigen::VectorXd>& param_grads, bool need_input_grad) const override;
  std::vector<Eigen::VectorXd*> params() override { return {&weights_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

  Index inputs() const { return in_; }
  Index outputs() const { return out_; }
  Eigen::Map<RowMatrixXd> weight_matrix() { return {weights_.data(), out_, in_}; }
  Eigen::Map<const RowMatrixXd> weight_matrix() const { return {weights_.data(), out_, in_}; }
  Eigen::VectorXd& bias() { return bias_; }

  void init(std::mt19937_64& rng);

private:
  Index in_, out_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd bias_;
};

// ---------------------------------------------------------------------------
// Free-function forms of the individual layer maps.

Tensor conv1d_forward(const Conv1d& layer, const Tensor& x);

struct Conv1dGrads {
  Tensor grad_x;
  RowMatrixXd grad_w;  // filters x (in_channels * kernel)
  Eigen::VectorXd grad_b;
};
Conv1dGrads conv1d_backward(const Conv1d& layer, const Tensor& x, const Tensor& grad_out);

Tensor conv2d_forward(const Conv2d& layer, const Tensor& x);

struct Conv2dGrads {
  Tensor grad_x;
  RowMatrixXd grad_w;
  Eigen::VectorXd grad_b;
};
Conv2dGrads conv2d_backward(const Conv2d& layer, const Tensor& x, const Tensor& grad_out);

Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits);

struct SoftmaxXent {
  double loss = 0.0;
  Eigen::VectorXd probs;
  Eigen::VectorXd grad;  // dL/dlogits = probs - onehot
};
SoftmaxXent softmax_xent(const Eigen::Ref<const Eigen::VectorXd>& logits, Index label);

}  // namespace wavescope
