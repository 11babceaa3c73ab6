#include "wavescope/transforms.hpp"

#include <iostream>

namespace wavescope {

using std::numbers::pi;

Spectrum dft_naive(const Eigen::Ref<const Eigen::VectorXd>& x, double sample_rate) {
  require(x.size() >= 1, "dft_naive: empty input");
  const Index n = x.size();
  Spectrum s;
  s.bins.resize(n);
  s.bin_hz = sample_rate / static_cast<double>(n);
  for (Index k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (Index t = 0; t < n; ++t) {
      // Reduce k*t mod n first so the angle stays small and exact.
      const double ang = -2.0 * pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    s.bins[k] = acc;
  }
  return s;
}

Eigen::VectorXcd fft(const Eigen::Ref<const Eigen::VectorXcd>& x) {
  Eigen::VectorXcd a = x;
  fft_inplace(a, false);
  return a;
}

Spectrum fft(const Eigen::Ref<const Eigen::VectorXd>& x, double sample_rate) {
  Spectrum s;
  s.bins = x.cast<std::complex<double>>();
  fft_inplace(s.bins, false);
  s.bin_hz = sample_rate / static_cast<double>(x.size());
  return s;
}

Eigen::VectorXcd ifft(const Eigen::Ref<const Eigen::VectorXcd>& bins) {
  Eigen::VectorXcd a = bins;
  fft_inplace(a, true);
  return a;
}

Eigen::VectorXd ifft(const Spectrum& s) { return ifft(s.bins).real(); }

Eigen::VectorXd power_spectrum(const Eigen::Ref<const Eigen::VectorXd>& x, Index n_fft) {
  if (n_fft == 0) n_fft = next_pow2(std::max<Index>(1, x.size()));
  require(is_pow2(n_fft) && n_fft >= x.size(), "power_spectrum: n_fft must be a power of two >= len(x)");
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n_fft);
  a.head(x.size()) = x.cast<std::complex<double>>();
  fft_inplace(a, false);
  return a.head(n_fft / 2 + 1).cwiseAbs2();
}

Eigen::VectorXd make_window(Window kind, Index n) {
  if (kind == Window::rectangular) return Eigen::VectorXd::Ones(n);
  Eigen::VectorXd w(n);
  for (Index i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * pi * i / static_cast<double>(n));
  return w;
}

RowMatrixXd stft(const Eigen::Ref<const Eigen::VectorXd>& x, Index window_len, Index hop,
                 Window window) {
  require(hop > 0, "stft: hop must be positive");
  require(window_len >= 1 && window_len <= x.size(), "stft: window_len must be in [1, len(x)]");
  const Index n_fft = next_pow2(window_len);
  const Index frames = stft_frame_count(x.size(), window_len, hop);
  const Eigen::VectorXd win = make_window(window, window_len);

  RowMatrixXd out(frames, n_fft / 2 + 1);
  Eigen::VectorXcd buf(n_fft);
  for (Index f = 0; f < frames; ++f) {
    buf.setZero();
    buf.head(window_len) = x.segment(f * hop, window_len).cwiseProduct(win).cast<std::complex<double>>();
    fft_inplace(buf, false);
    out.row(f) = buf.head(n_fft / 2 + 1).cwiseAbs2().transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------

const char* to_string(WaveletKind k) { return k == WaveletKind::morlet ? "morlet" : "mexican_hat"; }

WaveletKind wavelet_kind_from_string(const std::string& s) {
  if (s == "morlet") return WaveletKind::morlet;
  if (s == "mexican_hat" || s == "mexhat" || s == "ricker") return WaveletKind::mexican_hat;
  throw ContractError("unknown wavelet basis: " + s);
}

double WaveletBasis::center_freq_factor() const {
  return kind == WaveletKind::morlet ? omega0 / (2.0 * pi) : std::sqrt(2.0) / (2.0 * pi);
}

Index WaveletBasis::support(double a) const {
  return 2 * static_cast<Index>(std::ceil(support_sigmas * a)) + 1;
}

double mother_wavelet(const WaveletBasis& basis, double t) {
  const double g = std::exp(-0.5 * t * t);
  if (basis.kind == WaveletKind::mexican_hat) return (1.0 - t * t) * g;
  return (std::cos(basis.omega0 * t) - std::exp(-0.5 * basis.omega0 * basis.omega0)) * g;
}

Eigen::VectorXd wavelet_samples(const WaveletBasis& basis, double a, Index n) {
  require(a > 0.0, "wavelet_samples: scale must be positive");
  require(n >= 1, "wavelet_samples: length must be positive");
  const double center = 0.5 * static_cast<double>(n - 1);
  Eigen::VectorXd psi(n), env(n);
  for (Index k = 0; k < n; ++k) {
    const double t = (static_cast<double>(k) - center) / a;
    psi[k] = mother_wavelet(basis, t);
    env[k] = std::exp(-0.5 * t * t);
  }
  psi -= (psi.sum() / env.sum()) * env;
  const double norm = psi.norm();
  if (norm > 0.0) psi /= norm;
  return psi;
}

Eigen::VectorXd geometric_scales(double a0, double ratio, Index count) {
  require(a0 > 0.0 && ratio > 0.0 && count >= 1, "geometric_scales: bad arguments");
  Eigen::VectorXd s(count);
  for (Index k = 0; k < count; ++k) s[k] = a0 * std::pow(ratio, static_cast<double>(k));
  return s;
}

double scale_for_frequency(const WaveletBasis& basis, double hz, int sr) {
  require(hz > 0.0 && sr > 0, "scale_for_frequency: bad arguments");
  return basis.center_freq_factor() * sr / hz;
}

namespace {

// Correlation of zero-padded x with a centered kernel, evaluated at every
// sample of x: y[t] = sum_k psi[k] x[t + k - c], c = (n - 1) / 2.
Eigen::VectorXd centered_correlation(const Eigen::VectorXcd& x_hat, Index len,
                                     const Eigen::VectorXd& psi) {
  const Index n_fft = x_hat.size();
  Eigen::VectorXcd k_hat = Eigen::VectorXcd::Zero(n_fft);
  k_hat.head(psi.size()) = psi.cast<std::complex<double>>();
  fft_inplace(k_hat, false);
  Eigen::VectorXcd prod = x_hat.cwiseProduct(k_hat.conjugate());
  fft_inplace(prod, true);
  const Index c = (psi.size() - 1) / 2;
  Eigen::VectorXd y(len);
  for (Index t = 0; t < len; ++t) y[t] = prod[((t - c) % n_fft + n_fft) % n_fft].real();
  return y;
}

}  // namespace

Scalogram cwt(const Waveform& w, const Eigen::Ref<const Eigen::VectorXd>& scales,
              const WaveletBasis& basis, Index hop) {
  require(scales.size() >= 1, "cwt: empty scale list");
  require((scales.array() > 0.0).all(), "cwt: scales must be positive");
  require(hop >= 1, "cwt: hop must be positive");
  validate(w);

  const Index len = w.size();
  const Index n_times = (len + hop - 1) / hop;
  Scalogram out;
  out.coefficients.resize(scales.size(), n_times);
  out.scales = scales;
  out.hop = hop;
  out.basis = basis.kind;
  out.sample_rate = w.sample_rate;
  out.signal_length = len;

  // One padded FFT size for all scales.
  const Index max_support = basis.support(scales.maxCoeff());
  const Index n_fft = next_pow2(len + max_support);
  Eigen::VectorXcd x_hat = Eigen::VectorXcd::Zero(n_fft);
  x_hat.head(len) = w.samples.cast<std::complex<double>>();
  fft_inplace(x_hat, false);

  for (Index s = 0; s < scales.size(); ++s) {
    const Eigen::VectorXd psi = wavelet_samples(basis, scales[s]);
    const Eigen::VectorXd y = centered_correlation(x_hat, len, psi);
    for (Index tau = 0; tau < n_times; ++tau) out.coefficients(s, tau) = y[tau * hop];
  }
  return out;
}

double admissibility_constant(const WaveletBasis& basis) {
  constexpr double a_ref = 64.0;
  constexpr Index n_fft = 1 << 17;
  const Eigen::VectorXd psi = wavelet_samples(basis, a_ref);
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n_fft);
  d.head(psi.size()) = psi.cast<std::complex<double>>();
  fft_inplace(d, false);
  double c = 0.0;
  for (Index k = 1; k <= n_fft / 2; ++k) c += std::norm(d[k]) / (a_ref * static_cast<double>(k));
  return c;
}

Waveform icwt(const Scalogram& s, const WaveletBasis& basis) {
  require(s.n_scales() >= 1, "icwt: empty scalogram");
  require(s.scales.size() == s.n_scales(), "icwt: scale vector does not match coefficient rows");

  double log_ratio = std::log(2.0);
  if (s.n_scales() == 1) {
    std::cerr << "icwt: single scale, reconstruction is lossy\n";
  } else {
    const double r = s.scales[1] / s.scales[0];
    require(r > 1.0, "icwt: scales must increase geometrically");
    for (Index k = 1; k < s.scales.size(); ++k)
      require(std::abs(s.scales[k] / s.scales[k - 1] - r) <= 1e-6 * r,
              "icwt: scales are not a geometric progression");
    log_ratio = std::log(r);
  }

  const double c_psi = admissibility_constant(basis);
  const Index len = s.signal_length;
  const Index max_support = basis.support(s.scales.maxCoeff());
  const Index n_fft = next_pow2(len + max_support);

  // Synthesis is the adjoint of the analysis correlation: place each
  // coefficient at its sample position and convolve with the centered psi.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(len);
  Eigen::VectorXcd u(n_fft), k_hat(n_fft);
  for (Index sc = 0; sc < s.n_scales(); ++sc) {
    const Eigen::VectorXd psi = wavelet_samples(basis, s.scales[sc]);
    const Index c = (psi.size() - 1) / 2;
    u.setZero();
    for (Index tau = 0; tau < s.n_times(); ++tau) u[tau * s.hop] = s.coefficients(sc, tau);
    fft_inplace(u, false);
    k_hat.setZero();
    k_hat.head(psi.size()) = psi.cast<std::complex<double>>();
    fft_inplace(k_hat, false);
    u = u.cwiseProduct(k_hat);
    fft_inplace(u, true);
    // conv with psi placed at 0..n-1 delays by c; undo it.
    const double weight = 1.0 / s.scales[sc];
    for (Index t = 0; t < len; ++t) x[t] += weight * u[(t + c) % n_fft].real();
  }
  x *= static_cast<double>(s.hop) * log_ratio / c_psi;
  return Waveform(std::move(x), s.sample_rate);
}

}  // namespace wavescope
