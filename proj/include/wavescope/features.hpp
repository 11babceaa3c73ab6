#pragma once

#include "wavescope/common.hpp"
#include "wavescope/signal_io.hpp"

#include <algorithm>
#include <cmath>

namespace wavescope {

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

struct MfccConfig {
  int n_mfcc = 40;
  int n_mels = 0;          // 0 -> max(40, 2 * n_mfcc)
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  double fmin = 0.0;
  double fmax = 0.0;       // 0 -> Nyquist

  int resolved_mels() const { return n_mels > 0 ? n_mels : std::max(40, 2 * n_mfcc); }
};

struct FeatureMatrix {
  RowMatrixXd values;  // n_mfcc x n_frames
  double frame_rate = 0.0;
};

/// Triangular mel filters, one row per filter over bins [0, n_fft/2].
///
/// Filter centres are equally spaced in mel with the first centre at fmin
/// and the last at fmax, so every bin inside [fmin, fmax] gets a positive
/// weight from some filter. A filter too narrow to touch any bin falls back
/// to a unit weight on the bin nearest its centre.
RowMatrixXd mel_filterbank(int sr, Index n_fft, int n_mels, double fmin, double fmax);

/// Orthonormal DCT-II matrix (n_out x n_in).
RowMatrixXd dct2_matrix(Index n_out, Index n_in);

/// Hann frame -> power spectrum -> mel -> log(. + 1e-10) -> DCT-II, first
/// n_mfcc coefficients per frame.
FeatureMatrix mfcc(const Waveform& w, const MfccConfig& cfg);

}  // namespace wavescope
