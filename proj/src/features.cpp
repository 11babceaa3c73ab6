#include "wavescope/features.hpp"

#include "wavescope/transforms.hpp"

#include <cmath>

namespace wavescope {

RowMatrixXd mel_filterbank(int sr, Index n_fft, int n_mels, double fmin, double fmax) {
  require(n_mels >= 1, "mel_filterbank: n_mels must be >= 1");
  require(sr > 0 && n_fft >= 2, "mel_filterbank: bad sample rate or n_fft");
  require(fmax <= 0.5 * sr, "mel_filterbank: fmax above Nyquist");
  require(fmin >= 0.0 && fmin < fmax, "mel_filterbank: need 0 <= fmin < fmax");

  const double lo = hz_to_mel(fmin);
  const double hi = hz_to_mel(fmax);
  const double step = n_mels > 1 ? (hi - lo) / (n_mels - 1) : hi - lo;
  const Index n_bins = n_fft / 2 + 1;
  const double bin_hz = static_cast<double>(sr) / static_cast<double>(n_fft);

  RowMatrixXd fb = RowMatrixXd::Zero(n_mels, n_bins);
  for (int m = 0; m < n_mels; ++m) {
    const double c_mel = n_mels > 1 ? lo + m * step : 0.5 * (lo + hi);
    const double left = mel_to_hz(c_mel - step);
    const double center = mel_to_hz(c_mel);
    const double right = mel_to_hz(c_mel + step);
    for (Index k = 0; k < n_bins; ++k) {
      const double f = k * bin_hz;
      double wgt = 0.0;
      if (f > left && f <= center) wgt = (f - left) / (center - left);
      else if (f > center && f < right) wgt = (right - f) / (right - center);
      fb(m, k) = wgt;
    }
    if (fb.row(m).sum() <= 0.0) {
      const auto nearest = std::min<Index>(n_bins - 1, static_cast<Index>(std::lround(center / bin_hz)));
      fb(m, nearest) = 1.0;
    }
  }
  return fb;
}

RowMatrixXd dct2_matrix(Index n_out, Index n_in) {
  RowMatrixXd d(n_out, n_in);
  const double s0 = std::sqrt(1.0 / n_in);
  const double s = std::sqrt(2.0 / n_in);
  for (Index k = 0; k < n_out; ++k)
    for (Index n = 0; n < n_in; ++n)
      d(k, n) = (k == 0 ? s0 : s) * std::cos(std::numbers::pi * k * (2.0 * n + 1.0) / (2.0 * n_in));
  return d;
}

FeatureMatrix mfcc(const Waveform& w, const MfccConfig& cfg) {
  validate(w);
  const int n_mels = cfg.resolved_mels();
  require(cfg.n_mfcc >= 1 && cfg.n_mfcc <= n_mels, "mfcc: need 1 <= n_mfcc <= n_mels");
  require(cfg.frame_ms >= 1.0, "mfcc: frame must be at least 1 ms");
  require(cfg.hop_ms > 0.0, "mfcc: hop must be positive");

  const auto frame = static_cast<Index>(std::llround(cfg.frame_ms * 1e-3 * w.sample_rate));
  const auto hop = std::max<Index>(1, static_cast<Index>(std::llround(cfg.hop_ms * 1e-3 * w.sample_rate)));
  require(frame >= 1 && frame <= w.size(), "mfcc: signal shorter than one frame");

  const double fmax = cfg.fmax > 0.0 ? cfg.fmax : 0.5 * w.sample_rate;
  const Index n_fft = next_pow2(frame);
  const RowMatrixXd mel = mel_filterbank(w.sample_rate, n_fft, n_mels, cfg.fmin, fmax);
  const RowMatrixXd dct = dct2_matrix(cfg.n_mfcc, n_mels);

  const RowMatrixXd power = stft(w.samples, frame, hop, Window::hann);  // frames x bins
  const Eigen::MatrixXd log_mel = ((mel * power.transpose()).array() + 1e-10).log();  // mels x frames

  FeatureMatrix out;
  out.values = dct * log_mel;
  out.frame_rate = static_cast<double>(w.sample_rate) / static_cast<double>(hop);
  return out;
}

}  // namespace wavescope
