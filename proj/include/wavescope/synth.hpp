#pragma once

#include "wavescope/signal_io.hpp"

#include <filesystem>
#include <random>
#include <vector>

namespace wavescope {

/// Gaussian-shaped band of white noise: spectrum weighted by
/// exp(-(f - center)^2 / (2 (rel_width * center)^2)), scaled to `rms`.
Eigen::VectorXd bandpass_noise(double center_hz, double rel_width, Index n, int sr, double rms, std::mt19937_64& rng);

/// Class centre frequencies: 400/1200/3000 Hz for up to three classes,
/// otherwise geometric between 300 and 3400 Hz.
std::vector<double> class_centers(int classes);

struct SynthOptions {
  int classes = 3;
  int per_class = 100;
  int sample_rate = 8000;
  double seconds = 1.0;
  double rel_width = 0.08;
  std::uint64_t seed = 0;
};

/// Writes fold<k>/<id>-<class>-0-0.wav files and an UrbanSound8K-style
/// metadata.csv under `dir`; folds 1..10 are assigned round-robin per class.
/// Returns the manifest path.
std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir, const SynthOptions& opt);

/// Bark-like test signal: silence, then at `onset_s` a burst of harmonics
/// plus band noise with a fast attack and exponential decay, then silence.
Waveform onset_signal(int sr, double seconds, double onset_s, std::uint64_t seed, double f0 = 500.0);

}  // namespace wavescope
