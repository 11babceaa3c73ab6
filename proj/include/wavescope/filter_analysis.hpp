#pragma once

#include "wavescope/filterbank.hpp"
#include "wavescope/signal_io.hpp"
#include "wavescope/transforms.hpp"

#include <optional>
#include <span>
#include <vector>

namespace wavescope {

/// Power spectrum of each kernel row zero-padded to pad_to: nb_f x (pad_to/2 + 1).
RowMatrixXd kernel_spectrum(const FilterBank& bank, Index pad_to = 1024);

struct FilterEstimate {
  double fc = 0.0;  // Hz, peak bin
  double fb = 0.0;  // Hz, contiguous -3 dB width around the peak
};

/// Empty for an all-zero spectrum.
std::optional<FilterEstimate> estimate_fc_fb(const Eigen::Ref<const Eigen::VectorXd>& spectrum, double bin_hz);

/// Least-squares fit ln fc = ln alpha + beta * rank over the ascending list.
struct ExponentialFit {
  double alpha = 0.0;
  double beta = 0.0;
  double r2 = 0.0;  // 1 by convention when ln fc has zero variance
};

struct SortedFit {
  std::vector<double> sorted_fc;       // ascending, positive entries only
  std::optional<ExponentialFit> fit;   // empty with fewer than 3 positive entries
};

SortedFit sort_and_fit(std::span<const double> fc);

struct FilterReport {
  RowMatrixXd spectra;
  double bin_hz = 0.0;
  std::vector<std::optional<FilterEstimate>> filters;
  std::vector<Index> order;  // filter indices by ascending fc, null filters last
  SortedFit fit;

  /// Share of non-null filters with fc below `hz`.
  double fraction_below(double hz) const;
};

FilterReport analyze_filters(const FilterBank& bank, Index pad_to = 1024);

struct ActivationMap {
  RowMatrixXd values;  // nb_f x out_len, non-negative
  Index stride = 1;
  Index kernel = 1;
  int sample_rate = 1;

  /// Input sample at the centre of output column i.
  Index center_sample(Index i) const { return i * stride + (kernel - 1) / 2; }
};

/// |conv1d(x)| per filter; with subtract_bias the bias is removed first so
/// silence maps to zero.
ActivationMap activation_map(const FilterBank& bank, const Waveform& w, bool subtract_bias = true);

struct CwtComparison {
  ActivationMap conv;
  Scalogram cwt;
  Eigen::VectorXd time_s;         // centre time of each compared column
  Eigen::VectorXd conv_envelope;  // per-column energy, max-normalized
  Eigen::VectorXd cwt_envelope;
  std::optional<double> correlation;
};

/// Energy envelopes of the conv layer and a hop-1 CWT, sampled at the conv
/// output centres, plus their Pearson correlation.
CwtComparison compare_with_cwt(const Waveform& w, const FilterBank& bank,
                               const Eigen::Ref<const Eigen::VectorXd>& scales, const WaveletBasis& basis);

}  // namespace wavescope
