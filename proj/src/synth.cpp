#include "wavescope/synth.hpp"

#include "wavescope/transforms.hpp"

#include <cmath>
#include <fstream>

namespace wavescope {

namespace fs = std::filesystem;

Eigen::VectorXd bandpass_noise(double center_hz, double rel_width, Index n, int sr, double rms,
                               std::mt19937_64& rng) {
  require(n >= 1 && sr > 0 && center_hz > 0.0 && rel_width > 0.0, "bandpass_noise: bad arguments");
  const Index n_fft = next_pow2(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd a(n_fft);
  for (Index i = 0; i < n_fft; ++i) a[i] = gauss(rng);
  fft_inplace(a, false);
  const double sigma = rel_width * center_hz;
  for (Index k = 0; k < n_fft; ++k) {
    const double f = static_cast<double>(std::min(k, n_fft - k)) * sr / static_cast<double>(n_fft);
    a[k] *= std::exp(-0.5 * (f - center_hz) * (f - center_hz) / (sigma * sigma));
  }
  fft_inplace(a, true);
  Eigen::VectorXd x = a.head(n).real();
  const double cur = std::sqrt(x.squaredNorm() / static_cast<double>(n));
  if (cur > 0.0) x *= rms / cur;
  return x;
}

std::vector<double> class_centers(int classes) {
  require(classes >= 1 && classes <= 10, "class_centers: 1..10 classes");
  if (classes <= 3) {
    std::vector<double> c{400.0, 1200.0, 3000.0};
    c.resize(static_cast<size_t>(classes));
    return c;
  }
  std::vector<double> c;
  for (int i = 0; i < classes; ++i) c.push_back(300.0 * std::pow(3400.0 / 300.0, i / double(classes - 1)));
  return c;
}

fs::path write_synthetic_dataset(const fs::path& dir, const SynthOptions& opt) {
  require(opt.per_class >= 1, "synth: per_class must be >= 1");
  const auto centers = class_centers(opt.classes);
  const Index n = static_cast<Index>(std::llround(opt.seconds * opt.sample_rate));
  require(2.0 * centers.back() < opt.sample_rate, "synth: class centre above Nyquist");

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> level(0.05, 0.3);
  fs::create_directories(dir);
  const fs::path manifest = dir / "metadata.csv";
  std::ofstream csv(manifest);
  if (!csv) throw FormatError("synth: cannot write " + manifest.string());
  csv << "slice_file_name,fsID,start,end,salience,fold,classID,class\n";

  int id = 0;
  for (int c = 0; c < opt.classes; ++c) {
    const std::string cls = "band_" + std::to_string(static_cast<int>(centers[static_cast<size_t>(c)])) + "hz";
    for (int i = 0; i < opt.per_class; ++i, ++id) {
      const int fold = i % 10 + 1;
      const std::string name = std::to_string(100000 + id) + "-" + std::to_string(c) + "-0-0.wav";
      const fs::path fold_dir = dir / ("fold" + std::to_string(fold));
      fs::create_directories(fold_dir);
      Waveform w(bandpass_noise(centers[static_cast<size_t>(c)], opt.rel_width, n, opt.sample_rate, level(rng), rng),
                 opt.sample_rate);
      write_wav(fold_dir / name, w, WavEncoding::float32);
      csv << name << ',' << 100000 + id << ",0," << opt.seconds << ",1," << fold << ',' << c << ',' << cls << '\n';
    }
  }
  return manifest;
}

Waveform onset_signal(int sr, double seconds, double onset_s, std::uint64_t seed, double f0) {
  require(sr > 0 && seconds > 0.0 && onset_s >= 0.0 && onset_s < seconds, "onset_signal: bad arguments");
  const Index n = static_cast<Index>(std::llround(seconds * sr));
  const Index onset = static_cast<Index>(std::llround(onset_s * sr));
  std::mt19937_64 rng(seed);
  const Eigen::VectorXd noise = bandpass_noise(2.0 * f0, 0.3, n, sr, 1.0, rng);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double attack = 0.005, decay = 0.06;
  for (Index t = onset; t < n; ++t) {
    const double u = static_cast<double>(t - onset) / sr;
    const double env = (1.0 - std::exp(-u / attack)) * std::exp(-u / decay);
    if (env < 1e-4 && u > attack) break;
    double tone = 0.0;
    for (int h = 1; h <= 4; ++h)
      if (h * f0 < 0.5 * sr) tone += std::sin(2.0 * std::numbers::pi * h * f0 * u) / h;
    x[t] = 0.5 * env * (tone + 0.5 * noise[t]);
  }
  return Waveform(std::move(x), sr);
}

}  // namespace wavescope
