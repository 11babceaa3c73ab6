#include "wavescope/filterbank.hpp"

namespace wavescope {

Index FilterBank::output_length(Index len) const {
  require(len >= kernel(), "filter bank: input shorter than kernel");
  return (len - kernel()) / stride + 1;
}

FilterBank FilterBank::from_layer(const Conv1d& layer, int sample_rate) {
  require(layer.in_channels() == 1, "filter bank: first layer must have a single input channel");
  FilterBank b;
  b.weights = layer.weight_matrix();
  b.bias = layer.bias();
  b.stride = layer.stride();
  b.sample_rate = sample_rate;
  return b;
}

Conv1d FilterBank::to_layer() const {
  require(filters() >= 1 && kernel() >= 1, "filter bank: empty");
  require(bias.size() == filters(), "filter bank: bias size mismatch");
  Conv1d layer(1, filters(), kernel(), stride);
  layer.weight_matrix() = weights;
  layer.bias() = bias;
  return layer;
}

RowMatrixXd apply(const FilterBank& bank, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Conv1d layer = bank.to_layer();
  return conv1d_forward(layer, Tensor::from_vector(x)).matrix();
}

}  // namespace wavescope
