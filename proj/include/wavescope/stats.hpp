#pragma once

#include "wavescope/common.hpp"

#include <cmath>
#include <optional>

namespace wavescope {

/// Pearson correlation; empty when either side has zero variance.
template <typename DerivedA, typename DerivedB>
std::optional<double> pearson(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  require(a.size() == b.size() && a.size() >= 2, "pearson: need two equal-length series of length >= 2");
  const auto ca = (a.array() - a.mean()).matrix().eval();
  const auto cb = (b.array() - b.mean()).matrix().eval();
  const double na = ca.norm(), nb = cb.norm();
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return ca.dot(cb) / (na * nb);
}

/// Centered moving average with a shrinking window at the edges.
template <typename Derived>
Eigen::VectorXd moving_average(const Eigen::MatrixBase<Derived>& x, Index window) {
  require(window >= 1, "moving_average: window must be >= 1");
  const Index n = x.size();
  if (window == 1) return x;
  Eigen::VectorXd prefix(n + 1);
  prefix[0] = 0.0;
  for (Index i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  const Index left = (window - 1) / 2, right = window / 2;
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - left);
    const Index hi = std::min<Index>(n - 1, i + right);
    out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

/// ||x - y|| / ||x||.
template <typename DerivedA, typename DerivedB>
double relative_l2(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y) {
  require(x.size() == y.size(), "relative_l2: length mismatch");
  const double nx = x.norm();
  require(nx > 0.0, "relative_l2: reference signal is zero");
  return (x - y).norm() / nx;
}

}  // namespace wavescope
