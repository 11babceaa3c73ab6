#pragma once

#include "wavescope/filterbank.hpp"
#include "wavescope/layers.hpp"
#include "wavescope/tensor.hpp"
#include "wavescope/transforms.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

namespace testing {

using wavescope::Index;
using wavescope::RowMatrixXd;
using wavescope::Tensor;

class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("wavescope-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline Eigen::VectorXd random_vector(Index n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline Eigen::VectorXd gaussian_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

// Pairwise relative error; pairs where both sides are below `floor` count as equal.
inline double max_rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-6) {
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    if (scale < floor) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

// Central-difference check of a layer's backward pass against the scalar
// loss L = <r, forward(x)> for a random projection r. Returns the largest
// relative error over input and parameter gradients.
inline double layer_grad_check(wavescope::Layer& layer, Tensor x, std::mt19937_64& rng, double h = 1e-5) {
  const wavescope::Shape out_shape = layer.output_shape(x.shape);
  const Eigen::VectorXd r = random_vector(wavescope::shape_size(out_shape), rng);
  auto loss = [&](const Tensor& in) { return r.dot(layer.forward(in, nullptr).values); };

  wavescope::LayerCache cache;
  layer.forward(x, &cache);
  std::vector<Eigen::VectorXd> pg;
  for (auto* p : layer.params()) pg.push_back(Eigen::VectorXd::Zero(p->size()));
  const Tensor gx = layer.backward(Tensor(out_shape, r), cache, pg, true);

  Eigen::VectorXd num_x(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double keep = x.values[i];
    x.values[i] = keep + h;
    const double lp = loss(x);
    x.values[i] = keep - h;
    const double lm = loss(x);
    x.values[i] = keep;
    num_x[i] = (lp - lm) / (2.0 * h);
  }
  double worst = max_rel_error(gx.values, num_x);

  auto params = layer.params();
  for (size_t k = 0; k < params.size(); ++k) {
    Eigen::VectorXd& p = *params[k];
    Eigen::VectorXd num(p.size());
    for (Index i = 0; i < p.size(); ++i) {
      const double keep = p[i];
      p[i] = keep + h;
      const double lp = loss(x);
      p[i] = keep - h;
      const double lm = loss(x);
      p[i] = keep;
      num[i] = (lp - lm) / (2.0 * h);
    }
    worst = std::max(worst, max_rel_error(pg[k], num));
  }
  return worst;
}

// Values drawn away from zero and pairwise separated, so ReLU kinks and
// max-pool ties stay farther than the finite-difference step.
inline Eigen::VectorXd separated_vector(Index n, std::mt19937_64& rng, double gap = 1e-3) {
  Eigen::VectorXd v(n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    for (;;) {
      const double c = u(rng);
      if (std::abs(c) < gap) continue;
      bool clash = false;
      for (Index j = 0; j < i && !clash; ++j) clash = std::abs(v[j] - c) < gap;
      if (clash) continue;
      v[i] = c;
      break;
    }
  }
  return v;
}

// Direct double sum: out[m][i] = sum_c sum_k w[m][c][k] x[c][i*stride + k] + b[m].
inline RowMatrixXd brute_conv1d(const wavescope::Conv1d& layer, const Tensor& x) {
  const auto w = layer.weight_matrix();
  const Index C = layer.in_channels(), K = layer.kernel(), S = layer.stride();
  const Index L = x.dim(1), n_out = (L - K) / S + 1;
  RowMatrixXd out(layer.filters(), n_out);
  for (Index m = 0; m < layer.filters(); ++m)
    for (Index i = 0; i < n_out; ++i) {
      double acc = layer.bias()[m];
      for (Index c = 0; c < C; ++c)
        for (Index k = 0; k < K; ++k) acc += w(m, c * K + k) * x.values[c * L + i * S + k];
      out(m, i) = acc;
    }
  return out;
}

inline Tensor brute_conv2d(const wavescope::Conv2d& layer, const Tensor& x) {
  const auto w = layer.weight_matrix();
  const Index C = layer.in_channels(), KH = layer.kernel_h(), KW = layer.kernel_w();
  const Index H = x.dim(1), W = x.dim(2), OH = H - KH + 1, OW = W - KW + 1;
  auto& bias = const_cast<wavescope::Conv2d&>(layer).bias();
  Tensor out({layer.filters(), OH, OW});
  for (Index m = 0; m < layer.filters(); ++m)
    for (Index oy = 0; oy < OH; ++oy)
      for (Index ox = 0; ox < OW; ++ox) {
        double acc = bias[m];
        for (Index c = 0; c < C; ++c)
          for (Index ky = 0; ky < KH; ++ky)
            for (Index kx = 0; kx < KW; ++kx)
              acc += w(m, (c * KH + ky) * KW + kx) * x.values[(c * H + oy + ky) * W + ox + kx];
        out.values[(m * OH + oy) * OW + ox] = acc;
      }
  return out;
}

// Scalar Adam, written out step by step.
struct ScalarAdam {
  double m = 0.0, v = 0.0;
  int t = 0;
  double step(double p, double g, double lr) {
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double m_hat = m / (1.0 - std::pow(b1, t));
    const double v_hat = v / (1.0 - std::pow(b2, t));
    return p - lr * m_hat / (std::sqrt(v_hat) + eps);
  }
};

// Dense analysis matrix of a single-channel filter bank: row (m, i) holds
// w_m placed at i * stride.
inline Eigen::MatrixXd dense_analysis_matrix(const wavescope::FilterBank& bank, Index L) {
  const Index n_out = (L - bank.kernel()) / bank.stride + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(bank.filters() * n_out, L);
  for (Index m = 0; m < bank.filters(); ++m)
    for (Index i = 0; i < n_out; ++i)
      A.row(m * n_out + i).segment(i * bank.stride, bank.kernel()) = bank.weights.row(m);
  return A;
}

// Minimum-norm regularized solve (A^T A + eps I) x = A^T y, via complete
// orthogonal decomposition for the eps = 0 case.
inline Eigen::VectorXd dense_ls_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double eps) {
  if (eps == 0.0) return A.completeOrthogonalDecomposition().solve(y);
  const Eigen::MatrixXd N = A.transpose() * A + eps * Eigen::MatrixXd::Identity(A.cols(), A.cols());
  return N.ldlt().solve(A.transpose() * y);
}

// Single coefficient by direct summation:
// S[s][tau] = sum_k psi_s[k] x[tau*hop + k - c_s], x zero outside [0, L).
inline double brute_cwt_coefficient(const Eigen::VectorXd& x, double scale, Index tau, Index hop,
                                    const wavescope::WaveletBasis& basis) {
  const Eigen::VectorXd psi = wavescope::wavelet_samples(basis, scale);
  const Index c = (psi.size() - 1) / 2;
  double acc = 0.0;
  for (Index k = 0; k < psi.size(); ++k) {
    const Index t = tau * hop + k - c;
    if (t >= 0 && t < x.size()) acc += psi[k] * x[t];
  }
  return acc;
}

// Band-limited noise from a random spectrum restricted to [lo, hi] cycles per sample.
inline Eigen::VectorXd band_limited_noise(Index n, double lo, double hi, std::mt19937_64& rng) {
  const Index n_fft = wavescope::next_pow2(n);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd spec = Eigen::VectorXcd::Zero(n_fft);
  for (Index k = 1; k < n_fft / 2; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n_fft);
    if (f < lo || f > hi) continue;
    spec[k] = std::complex<double>(g(rng), g(rng));
    spec[n_fft - k] = std::conj(spec[k]);
  }
  wavescope::fft_inplace(spec, true);
  Eigen::VectorXd x = spec.head(n).real();
  return x / x.cwiseAbs().maxCoeff();
}

}  // namespace testing
