#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace wavescope {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Row-major storage: one contiguous row per channel / filter.
template <typename Scalar>
using RowMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RowMatrixXd = RowMatrixX<double>;

/// Violated precondition of an operation (bad shape, bad argument).
class ContractError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file (bad header, missing column).
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input using a feature we do not decode.
class UnsupportedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input parsed fine but carries out-of-range values.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractError(what);
}

}  // namespace wavescope
