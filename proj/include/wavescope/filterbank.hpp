#pragma once

#include "wavescope/layers.hpp"

namespace wavescope {

/// First-layer kernels of a raw-waveform model: one row per filter.
struct FilterBank {
  RowMatrixXd weights;   // nb_f x f_1
  Eigen::VectorXd bias;  // nb_f
  Index stride = 1;
  int sample_rate = 8000;

  Index filters() const { return weights.rows(); }
  Index kernel() const { return weights.cols(); }

  /// Valid output length for an input of `len` samples.
  Index output_length(Index len) const;

  static FilterBank from_layer(const Conv1d& layer, int sample_rate);
  Conv1d to_layer() const;
};

/// Raw layer output S (nb_f x out_len), bias included.
RowMatrixXd apply(const FilterBank& bank, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace wavescope
