#pragma once

#include "wavescope/common.hpp"

#include <string>
#include <vector>

namespace wavescope {

using Shape = std::vector<Index>;

Index shape_size(const Shape& s);
std::string shape_string(const Shape& s);

/// Dense row-major tensor: (channels x length) or (channels x h x w).
struct Tensor {
  Shape shape;
  Eigen::VectorXd values;

  Tensor() = default;
  explicit Tensor(Shape s);
  Tensor(Shape s, Eigen::VectorXd v);

  static Tensor from_matrix(const Eigen::Ref<const RowMatrixXd>& m);
  static Tensor from_vector(const Eigen::Ref<const Eigen::VectorXd>& v);

  Index size() const { return values.size(); }
  Index rank() const { return static_cast<Index>(shape.size()); }
  Index dim(Index i) const { return shape[static_cast<size_t>(i)]; }

  /// First axis as rows, remaining axes flattened as columns.
  Eigen::Map<RowMatrixXd> matrix();
  Eigen::Map<const RowMatrixXd> matrix() const;
};

}  // namespace wavescope
