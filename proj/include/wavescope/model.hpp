#pragma once

#include "wavescope/filterbank.hpp"
#include "wavescope/layers.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace wavescope {

enum class Pipeline { raw, mfcc };

const char* to_string(Pipeline p);
Pipeline pipeline_from_string(const std::string& s);

/// Reference architectures. The first raw-pipeline layer is Conv1d(f1, nb_f,
/// stride); the deeper stack is fixed:
///   raw:  Conv1d -> ReLU -> MaxPool(8) -> Conv1d(5, 2nb_f) -> ReLU -> MaxPool(4)
///         -> Conv1d(5, 2nb_f) -> ReLU -> MaxPool(4) -> Dense(hidden) -> ReLU -> Dense(classes)
///   mfcc: 2 x [Conv2d 3x3 -> ReLU -> Conv2d 3x3 -> ReLU -> MaxPool 2x2]
///         -> Dense(hidden) -> ReLU -> Dense(classes)
struct ModelConfig {
  Pipeline arch = Pipeline::raw;
  Index f1 = 72;
  Index nb_f = 32;
  Index stride = 2;
  Index input_length = 8000;  // raw: samples per example
  Index n_mfcc = 40;          // mfcc: feature rows
  Index n_frames = 0;         // mfcc: feature columns
  Index hidden = 128;
  Index n_classes = 10;
  Index vgg_channels = 16;    // block 1; block 2 doubles it
  int sample_rate = 8000;
  std::uint64_t seed = 0;

  Shape input_shape() const;
};

class Model {
public:
  Model() = default;
  explicit Model(ModelConfig cfg);
  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  const ModelConfig& config() const { return cfg_; }
  const Shape& input_shape() const { return input_shape_; }
  Shape output_shape() const;

  void add(std::unique_ptr<Layer> layer);
  Index layer_count() const { return static_cast<Index>(layers_.size()); }
  Layer& layer(Index i) { return *layers_[static_cast<size_t>(i)]; }
  const Layer& layer(Index i) const { return *layers_[static_cast<size_t>(i)]; }

  /// Logits for one example.
  Tensor forward(const Tensor& x) const;

  /// Softmax cross-entropy loss for one example; gradients are accumulated
  /// into `grads` (layout from zero_grads()).
  double loss_and_grad(const Tensor& x, Index label, std::vector<std::vector<Eigen::VectorXd>>& grads,
                       Eigen::VectorXd* probs = nullptr) const;

  std::vector<std::vector<Eigen::VectorXd>> zero_grads() const;
  std::vector<Eigen::VectorXd*> parameters();
  Index parameter_count() const;

  /// First Conv1d layer as a filter bank (raw pipeline only).
  FilterBank filter_bank() const;

private:
  ModelConfig cfg_;
  Shape input_shape_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

Model build_raw_model(const ModelConfig& cfg);
Model build_mfcc_model(const ModelConfig& cfg);
Model build_model(const ModelConfig& cfg);

/// Softmax probabilities.
Eigen::VectorXd predict(const Model& model, const Tensor& x);
std::vector<Eigen::VectorXd> predict(const Model& model, const std::vector<Tensor>& batch);

/// Index of the largest entry; ties go to the lowest index.
Index argmax(const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace wavescope
