#pragma once

#include "wavescope/common.hpp"
#include "wavescope/signal_io.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace wavescope {

template <typename Scalar>
using ComplexVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

struct Spectrum {
  Eigen::VectorXcd bins;
  double bin_hz = 1.0;

  Index size() const { return bins.size(); }
};

constexpr bool is_pow2(Index n) { return n > 0 && (n & (n - 1)) == 0; }

constexpr Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 FFT. The inverse is scaled by 1/N.
template <typename Scalar>
void fft_inplace(ComplexVectorX<Scalar>& a, bool inverse = false) {
  const Index n = a.size();
  require(is_pow2(n), "fft: length must be a power of two");

  for (Index i = 1, j = 0; i < n; ++i) {
    Index bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const Scalar sign = inverse ? Scalar(1) : Scalar(-1);
  for (Index len = 2; len <= n; len <<= 1) {
    const Index half = len / 2;
    // Twiddles from direct evaluation; the recurrence w *= w_len drifts
    // by ~1e-13 at N = 1024, which is too much for the oracle tests.
    ComplexVectorX<Scalar> tw(half);
    for (Index k = 0; k < half; ++k) {
      const Scalar ang = sign * Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(len);
      tw[k] = std::complex<Scalar>(std::cos(ang), std::sin(ang));
    }
    for (Index i = 0; i < n; i += len) {
      for (Index k = 0; k < half; ++k) {
        const std::complex<Scalar> u = a[i + k];
        const std::complex<Scalar> v = a[i + k + half] * tw[k];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse) a /= Scalar(n);
}

/// Direct O(N^2) DFT, used as a test oracle.
Spectrum dft_naive(const Eigen::Ref<const Eigen::VectorXd>& x, double sample_rate = 1.0);

/// Forward FFT of a real sequence; length must be a power of two.
Spectrum fft(const Eigen::Ref<const Eigen::VectorXd>& x, double sample_rate = 1.0);
Eigen::VectorXcd fft(const Eigen::Ref<const Eigen::VectorXcd>& x);
Eigen::VectorXcd ifft(const Eigen::Ref<const Eigen::VectorXcd>& bins);
/// Real part of the inverse transform.
Eigen::VectorXd ifft(const Spectrum& s);

/// |FFT|^2 over bins [0, n_fft/2] of x zero-padded to n_fft
/// (n_fft = 0 picks the next power of two >= len(x)).
Eigen::VectorXd power_spectrum(const Eigen::Ref<const Eigen::VectorXd>& x, Index n_fft = 0);

enum class Window { hann, rectangular };

/// Periodic window of length n.
Eigen::VectorXd make_window(Window kind, Index n);

/// Power STFT: frames x (n_fft/2 + 1), with n_fft = next_pow2(window_len).
RowMatrixXd stft(const Eigen::Ref<const Eigen::VectorXd>& x, Index window_len, Index hop,
                 Window window = Window::hann);

inline Index stft_frame_count(Index n, Index window_len, Index hop) {
  return n < window_len ? 0 : (n - window_len) / hop + 1;
}

// ---------------------------------------------------------------------------
// Wavelets

enum class WaveletKind { morlet, mexican_hat };

const char* to_string(WaveletKind k);
WaveletKind wavelet_kind_from_string(const std::string& s);

struct WaveletBasis {
  WaveletKind kind = WaveletKind::morlet;
  double omega0 = 6.0;        // Morlet carrier, rad per unit time
  double support_sigmas = 5;  // half support in units of the scale

  /// Peak frequency of the mother wavelet in cycles per unit time. At scale
  /// a (samples) the peak sits at center_freq_factor() / a cycles/sample.
  double center_freq_factor() const;

  /// Odd sample count covering the wavelet at scale a.
  Index support(double a) const;
};

/// Mother wavelet evaluated at continuous time t (unnormalized).
double mother_wavelet(const WaveletBasis& basis, double t);

/// Centered, discretized wavelet at scale a (in samples). The sampled curve
/// is projected to exact zero mean along its Gaussian envelope and scaled to
/// unit L2 norm, which absorbs the 1/sqrt(a) prefactor.
Eigen::VectorXd wavelet_samples(const WaveletBasis& basis, double a, Index n);
inline Eigen::VectorXd wavelet_samples(const WaveletBasis& basis, double a) {
  return wavelet_samples(basis, a, basis.support(a));
}

/// a_k = a0 * ratio^k, k = 0..count-1.
Eigen::VectorXd geometric_scales(double a0, double ratio, Index count);

/// Scale of `basis` whose peak frequency is `hz` at sample rate `sr`.
double scale_for_frequency(const WaveletBasis& basis, double hz, int sr);

struct Scalogram {
  RowMatrixXd coefficients;  // scales x times
  Eigen::VectorXd scales;
  Index hop = 1;
  WaveletKind basis = WaveletKind::morlet;
  int sample_rate = 1;
  Index signal_length = 0;

  Index n_scales() const { return coefficients.rows(); }
  Index n_times() const { return coefficients.cols(); }
};

/// coefficients(s, tau) = sum_t x[t] psi_s[t - tau*hop] with psi_s centered;
/// the signal is zero outside [0, L).
Scalogram cwt(const Waveform& w, const Eigen::Ref<const Eigen::VectorXd>& scales,
              const WaveletBasis& basis, Index hop = 1);

/// Admissibility constant: integral over (0, inf) of |Psi(w)|^2 / w, summed
/// numerically from the spectrum of a finely sampled unit-norm wavelet.
double admissibility_constant(const WaveletBasis& basis);

/// Discretized inverse over a geometric scale grid:
///   x(t) = hop * ln(r) / C * sum_s 1/a_s sum_tau S(s, tau) psi_s(t - tau*hop).
/// A single-scale scalogram has no grid ratio; one octave is assumed and the
/// result is lossy.
Waveform icwt(const Scalogram& s, const WaveletBasis& basis);

}  // namespace wavescope
