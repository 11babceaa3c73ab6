#include "wavescope/tensor.hpp"

#include <numeric>

namespace wavescope {

Index shape_size(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), Index{1}, std::multiplies<>());
}

std::string shape_string(const Shape& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += " x ";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape s) : shape(std::move(s)), values(Eigen::VectorXd::Zero(shape_size(shape))) {}

Tensor::Tensor(Shape s, Eigen::VectorXd v) : shape(std::move(s)), values(std::move(v)) {
  require(shape_size(shape) == values.size(),
          "tensor: shape " + shape_string(shape) + " does not match " + std::to_string(values.size()) + " values");
}

Tensor Tensor::from_matrix(const Eigen::Ref<const RowMatrixXd>& m) {
  Tensor t({m.rows(), m.cols()});
  t.matrix() = m;
  return t;
}

Tensor Tensor::from_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return Tensor({1, v.size()}, v);
}

Eigen::Map<RowMatrixXd> Tensor::matrix() {
  const Index rows = shape.empty() ? 1 : shape[0];
  return {values.data(), rows, rows ? values.size() / rows : 0};
}

Eigen::Map<const RowMatrixXd> Tensor::matrix() const {
  const Index rows = shape.empty() ? 1 : shape[0];
  return {values.data(), rows, rows ? values.size() / rows : 0};
}

}  // namespace wavescope
