#include "wavescope/reconstruction.hpp"

#include "wavescope/stats.hpp"
#include "wavescope/transforms.hpp"

#include <cmath>
#include <iostream>
#include <limits>

namespace wavescope {

const char* to_string(ReconMode m) {
  return m == ReconMode::least_squares ? "least_squares" : "spectral_division";
}

ReconMode recon_mode_from_string(const std::string& s) {
  if (s == "least_squares") return ReconMode::least_squares;
  if (s == "spectral_division") return ReconMode::spectral_division;
  throw ContractError("unknown reconstruction mode: " + s);
}

// ---------------------------------------------------------------------------

AnalysisOperator::AnalysisOperator(const FilterBank& bank, Index signal_length)
    : weights_(bank.weights), stride_(bank.stride), length_(signal_length) {
  require(bank.filters() >= 1 && bank.kernel() >= 1 && bank.stride >= 1, "analysis operator: empty bank");
  out_len_ = bank.output_length(signal_length);
}

RowMatrixXd AnalysisOperator::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require(x.size() == length_, "analysis operator: input length mismatch");
  using Strided = Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>>;
  const Strided cols(x.data(), weights_.cols(), out_len_, Eigen::OuterStride<>(stride_));
  return weights_ * cols;
}

Eigen::VectorXd AnalysisOperator::adjoint(const Eigen::Ref<const RowMatrixXd>& y) const {
  require(y.rows() == weights_.rows() && y.cols() == out_len_, "analysis operator: output shape mismatch");
  const Eigen::MatrixXd cols = weights_.transpose() * y;
  const Index k = weights_.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(length_);
  for (Index i = 0; i < out_len_; ++i) x.segment(i * stride_, k) += cols.col(i);
  return x;
}

CgResult solve_normal_equations(const AnalysisOperator& op, const Eigen::Ref<const RowMatrixXd>& y, double eps,
                                int max_iterations, double tolerance) {
  require(eps >= 0.0, "cg: ridge must be >= 0");
  auto normal = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return op.adjoint(op.apply(v)) + eps * v;
  };

  const Eigen::VectorXd b = op.adjoint(y);
  const double b_norm = b.norm();
  CgResult res;
  res.x = Eigen::VectorXd::Zero(op.signal_length());
  if (b_norm == 0.0) {
    res.converged = true;
    return res;
  }

  Eigen::VectorXd x = res.x;
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  double best = std::sqrt(rr) / b_norm;
  res.relative_residual = best;

  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd q = normal(p);
    const double pq = p.dot(q);
    if (!(pq > 0.0)) break;
    const double alpha = rr / pq;
    x += alpha * p;
    r -= alpha * q;
    const double rr_new = r.squaredNorm();
    const double rel = std::sqrt(rr_new) / b_norm;
    res.iterations = it;
    if (rel < best) {
      best = rel;
      res.x = x;
      res.relative_residual = rel;
    }
    if (rel <= tolerance) {
      res.converged = true;
      return res;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return res;
}

double absolute_ridge(const FilterBank& bank, double rel) {
  const Index n_fft = std::max<Index>(1024, next_pow2(bank.kernel()));
  double mx = 0.0;
  for (Index m = 0; m < bank.filters(); ++m)
    mx = std::max(mx, power_spectrum(bank.weights.row(m).transpose(), n_fft).maxCoeff());
  return rel * mx;
}

namespace {

bool is_zero_kernel(const FilterBank& bank, Index m) { return bank.weights.row(m).cwiseAbs().maxCoeff() == 0.0; }

Eigen::VectorXcd padded_fft(const Eigen::Ref<const Eigen::VectorXd>& x, Index n_fft) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n_fft);
  a.head(x.size()) = x.cast<std::complex<double>>();
  fft_inplace(a, false);
  return a;
}

// W / (|W|^2 + eps) with eps relative to this filter's peak power.
Eigen::VectorXcd inverse_response(const Eigen::VectorXcd& w_hat, double rel) {
  const Eigen::VectorXd p = w_hat.cwiseAbs2();
  const double eps = rel * p.maxCoeff();
  Eigen::VectorXcd out(w_hat.size());
  for (Index k = 0; k < w_hat.size(); ++k) out[k] = p[k] + eps > 0.0 ? w_hat[k] / (p[k] + eps) : 0.0;
  return out;
}

Eigen::VectorXd smooth(const Eigen::VectorXd& x, Index window) {
  return window > 1 ? moving_average(x, window) : x;
}

void warn_excluded(const std::vector<Index>& excluded) {
  if (excluded.empty()) return;
  std::cerr << "reconstruction: " << excluded.size() << " zero kernel(s) excluded\n";
}

}  // namespace

InverseBasis inverse_basis(const FilterBank& bank, const ReconConfig& cfg) {
  require(cfg.ridge >= 0.0, "inverse_basis: ridge must be >= 0");
  require(cfg.basis_positions >= 1, "inverse_basis: basis_positions must be >= 1");
  InverseBasis out;
  for (Index m = 0; m < bank.filters(); ++m)
    if (is_zero_kernel(bank, m)) out.excluded.push_back(m);
  warn_excluded(out.excluded);

  if (cfg.mode == ReconMode::spectral_division) {
    const Index n_fft = next_pow2(4 * bank.kernel());
    out.waveforms = RowMatrixXd::Zero(bank.filters(), n_fft);
    for (Index m = 0; m < bank.filters(); ++m) {
      if (is_zero_kernel(bank, m)) continue;
      Eigen::VectorXcd h = inverse_response(padded_fft(bank.weights.row(m).transpose(), n_fft), cfg.ridge);
      fft_inplace(h, true);
      // Rotate so lag 0 sits in the middle.
      Eigen::VectorXd centred(n_fft);
      for (Index t = 0; t < n_fft; ++t) centred[t] = h[(t + n_fft / 2) % n_fft].real();
      out.waveforms.row(m) = smooth(centred, cfg.smooth_window).transpose();
    }
    return out;
  }

  const Index len = bank.kernel() + (cfg.basis_positions - 1) * bank.stride;
  const AnalysisOperator op(bank, len);
  const double eps = absolute_ridge(bank, cfg.ridge);
  const Index centre = (op.output_length() - 1) / 2;
  out.waveforms = RowMatrixXd::Zero(bank.filters(), len);
  for (Index m = 0; m < bank.filters(); ++m) {
    if (is_zero_kernel(bank, m)) continue;
    RowMatrixXd unit = RowMatrixXd::Zero(bank.filters(), op.output_length());
    unit(m, centre) = 1.0;
    const CgResult cg = solve_normal_equations(op, unit, eps, cfg.max_iterations, cfg.tolerance);
    out.waveforms.row(m) = smooth(cg.x, cfg.smooth_window).transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd apply_shift(const Eigen::Ref<const Eigen::VectorXd>& x, Index shift) {
  const Index n = x.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Index t = 0; t < n; ++t) {
    const Index src = t + shift;
    if (src >= 0 && src < n) out[t] = x[src];
  }
  return out;
}

Alignment realign(const Eigen::Ref<const Eigen::VectorXd>& recovered, const Eigen::Ref<const Eigen::VectorXd>& original,
                  Index search) {
  require(recovered.size() == original.size(), "realign: length mismatch");
  require(search >= 0, "realign: search must be >= 0");
  const Index n = original.size();
  Alignment best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Index d = -search; d <= search; ++d) {
    const Index lo = std::max<Index>(0, -d);
    const Index hi = std::min<Index>(n, n - d);
    if (hi <= lo) continue;
    const double score = original.segment(lo, hi - lo).dot(recovered.segment(lo + d, hi - lo));
    // Ties go to the smaller |shift|.
    if (score > best_score || (score == best_score && std::abs(d) < std::abs(best.shift))) {
      best_score = score;
      best.shift = d;
    }
  }
  const Eigen::VectorXd aligned = apply_shift(recovered, best.shift);
  const double denom = original.norm() * aligned.norm();
  best.correlation = denom > 0.0 ? original.dot(aligned) / denom : 0.0;
  best.low_confidence = std::abs(best.correlation) < 0.3;
  return best;
}

double recon_error(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& x_hat) {
  return relative_l2(x, x_hat);
}

Eigen::VectorXd amplitude_envelope(const Eigen::Ref<const Eigen::VectorXd>& x, Index window) {
  return moving_average(x.cwiseAbs2(), window).cwiseSqrt();
}

ReconResult recover(const Eigen::Ref<const RowMatrixXd>& s, const FilterBank& bank, const ReconConfig& cfg,
                    const Eigen::VectorXd* reference, Index signal_length) {
  require(cfg.cm != 0.0, "recover: cm must be non-zero");
  require(cfg.ridge >= 0.0, "recover: ridge must be >= 0");
  require(s.rows() == bank.filters(), "recover: S rows must equal the number of filters");
  require(s.cols() >= 1, "recover: empty layer output");
  const Index covered = (s.cols() - 1) * bank.stride + bank.kernel();
  const Index len = signal_length > 0 ? signal_length : covered;
  require(bank.output_length(len) == s.cols(), "recover: S width does not match signal length and stride");
  if (reference) require(reference->size() == len, "recover: reference length mismatch");

  ReconResult res;
  const RowMatrixXd centred = s.colwise() - bank.bias;
  Eigen::VectorXd x;

  if (cfg.mode == ReconMode::least_squares) {
    const AnalysisOperator op(bank, len);
    const CgResult cg = solve_normal_equations(op, centred, absolute_ridge(bank, cfg.ridge), cfg.max_iterations,
                                               cfg.tolerance);
    x = cg.x;
    res.converged = cg.converged;
    res.iterations = cg.iterations;
  } else {
    const Index n_fft = next_pow2(len + bank.kernel());
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n_fft);
    Eigen::VectorXcd u(n_fft);
    for (Index m = 0; m < bank.filters(); ++m) {
      if (is_zero_kernel(bank, m)) {
        res.excluded_filters.push_back(m);
        continue;
      }
      // Zero-stuff back to the input rate; the factor `stride` restores the
      // baseband gain lost by decimation.
      u.setZero();
      for (Index i = 0; i < s.cols(); ++i) u[i * bank.stride] = static_cast<double>(bank.stride) * centred(m, i);
      fft_inplace(u, false);
      acc += u.cwiseProduct(inverse_response(padded_fft(bank.weights.row(m).transpose(), n_fft), cfg.ridge));
    }
    warn_excluded(res.excluded_filters);
    fft_inplace(acc, true);
    x = acc.head(len).real();
  }

  x /= cfg.cm;
  x = smooth(x, cfg.smooth_window);

  if (reference) {
    const Index search = cfg.align_search >= 0 ? cfg.align_search : bank.kernel();
    const Alignment al = realign(x, *reference, search);
    res.shift = al.shift;
    res.low_confidence_alignment = al.low_confidence;
    x = apply_shift(x, al.shift);
    if (cfg.auto_gain) {
      const double xx = x.squaredNorm();
      res.gain = xx > 0.0 ? reference->dot(x) / xx : 1.0;
      x *= res.gain;
    }
    if (reference->norm() > 0.0) res.error = recon_error(*reference, x);
  }
  res.recovered = Waveform(std::move(x), bank.sample_rate);
  return res;
}

}  // namespace wavescope
