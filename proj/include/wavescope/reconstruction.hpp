#pragma once

#include "wavescope/filterbank.hpp"
#include "wavescope/signal_io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wavescope {

enum class ReconMode { least_squares, spectral_division };

const char* to_string(ReconMode m);
ReconMode recon_mode_from_string(const std::string& s);

struct ReconConfig {
  double cm = 1.0;  // global normalization: output is divided by cm
  ReconMode mode = ReconMode::least_squares;
  double ridge = 1e-6;       // relative to max_m max_f |W_m(f)|^2
  Index smooth_window = 5;   // centered moving average, 1 disables
  Index align_search = -1;   // +- samples; negative means f1
  bool auto_gain = false;    // least-squares global gain against the reference
  int max_iterations = 5000;
  double tolerance = 1e-12;  // CG: ||r|| <= tolerance * ||A^T s||
  Index basis_positions = 1; // least-squares coding basis support, in output columns
};

/// The stacked strided correlation A: R^L -> R^(nb_f x out_len), bias excluded.
class AnalysisOperator {
public:
  AnalysisOperator(const FilterBank& bank, Index signal_length);

  Index signal_length() const { return length_; }
  Index output_length() const { return out_len_; }

  RowMatrixXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd adjoint(const Eigen::Ref<const RowMatrixXd>& y) const;

private:
  RowMatrixXd weights_;
  Index stride_;
  Index length_;
  Index out_len_;
};

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;
};

/// Conjugate gradient on (A^T A + eps I) x = A^T y. Returns the iterate with
/// the smallest residual when max_iterations runs out.
CgResult solve_normal_equations(const AnalysisOperator& op, const Eigen::Ref<const RowMatrixXd>& y, double eps,
                                int max_iterations, double tolerance);

/// Absolute ridge for a relative setting: rel * max_m max_f |W_m(f)|^2.
double absolute_ridge(const FilterBank& bank, double rel);

struct InverseBasis {
  RowMatrixXd waveforms;       // nb_f x basis length
  std::vector<Index> excluded; // zero kernels
};

/// Per-filter synthesis waveforms. least_squares: columns of the regularized
/// pseudo-inverse for a unit coefficient at the centre output position.
/// spectral_division: centred impulse response of W_m / (|W_m|^2 + eps).
InverseBasis inverse_basis(const FilterBank& bank, const ReconConfig& cfg);

struct Alignment {
  Index shift = 0;          // aligned[t] = recovered[t + shift]
  double correlation = 0.0; // normalized correlation at the chosen shift
  bool low_confidence = false;
};

/// Shift in [-search, search] maximizing sum_t original[t] * recovered[t + shift].
Alignment realign(const Eigen::Ref<const Eigen::VectorXd>& recovered,
                  const Eigen::Ref<const Eigen::VectorXd>& original, Index search);

Eigen::VectorXd apply_shift(const Eigen::Ref<const Eigen::VectorXd>& x, Index shift);

/// ||x - x_hat|| / ||x||.
double recon_error(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& x_hat);

/// sqrt of the centered moving average of x^2.
Eigen::VectorXd amplitude_envelope(const Eigen::Ref<const Eigen::VectorXd>& x, Index window);

struct ReconResult {
  Waveform recovered;
  Index shift = 0;
  std::optional<double> error;  // only with a reference signal
  double gain = 1.0;
  bool converged = true;
  int iterations = 0;
  bool low_confidence_alignment = false;
  std::vector<Index> excluded_filters;
};

/// Recovers the input from raw layer output S (bias included), then divides
/// by cm, smooths and (given a reference) realigns and scores it.
/// signal_length <= 0 means the span covered by S: (out_len - 1) * stride + f1.
ReconResult recover(const Eigen::Ref<const RowMatrixXd>& s, const FilterBank& bank, const ReconConfig& cfg,
                    const Eigen::VectorXd* reference = nullptr, Index signal_length = 0);

}  // namespace wavescope
