#include "wavescope/filter_analysis.hpp"

#include "wavescope/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wavescope {

RowMatrixXd kernel_spectrum(const FilterBank& bank, Index pad_to) {
  require(is_pow2(pad_to) && pad_to >= bank.kernel(), "kernel_spectrum: pad_to must be a power of two >= f1");
  RowMatrixXd out(bank.filters(), pad_to / 2 + 1);
  for (Index m = 0; m < bank.filters(); ++m)
    out.row(m) = power_spectrum(bank.weights.row(m).transpose(), pad_to).transpose();
  return out;
}

std::optional<FilterEstimate> estimate_fc_fb(const Eigen::Ref<const Eigen::VectorXd>& spectrum, double bin_hz) {
  require(spectrum.size() >= 1 && bin_hz > 0.0, "estimate_fc_fb: empty spectrum or bad bin width");
  Index peak = 0;
  for (Index k = 1; k < spectrum.size(); ++k)
    if (spectrum[k] > spectrum[peak]) peak = k;
  const double top = spectrum[peak];
  if (!(top > 0.0)) return std::nullopt;

  const double half = 0.5 * top;
  Index lo = peak, hi = peak;
  while (lo > 0 && spectrum[lo - 1] >= half) --lo;
  while (hi + 1 < spectrum.size() && spectrum[hi + 1] >= half) ++hi;
  return FilterEstimate{static_cast<double>(peak) * bin_hz, static_cast<double>(hi - lo + 1) * bin_hz};
}

SortedFit sort_and_fit(std::span<const double> fc) {
  SortedFit out;
  for (double f : fc)
    if (f > 0.0) out.sorted_fc.push_back(f);
  std::sort(out.sorted_fc.begin(), out.sorted_fc.end());
  const auto n = static_cast<Index>(out.sorted_fc.size());
  if (n < 3) return out;

  Eigen::VectorXd rank = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) y[i] = std::log(out.sorted_fc[static_cast<size_t>(i)]);

  const double rm = rank.mean(), ym = y.mean();
  const Eigen::VectorXd rc = rank.array() - rm;
  const Eigen::VectorXd yc = y.array() - ym;
  const double beta = rc.dot(yc) / rc.squaredNorm();
  const double intercept = ym - beta * rm;
  const double ss_tot = yc.squaredNorm();
  const double ss_res = (y - (intercept + beta * rank.array()).matrix()).squaredNorm();

  ExponentialFit fit;
  fit.alpha = std::exp(intercept);
  fit.beta = beta;
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  out.fit = fit;
  return out;
}

double FilterReport::fraction_below(double hz) const {
  Index valid = 0, below = 0;
  for (const auto& f : filters) {
    if (!f) continue;
    ++valid;
    if (f->fc < hz) ++below;
  }
  return valid ? static_cast<double>(below) / static_cast<double>(valid) : 0.0;
}

FilterReport analyze_filters(const FilterBank& bank, Index pad_to) {
  FilterReport r;
  r.spectra = kernel_spectrum(bank, pad_to);
  r.bin_hz = static_cast<double>(bank.sample_rate) / static_cast<double>(pad_to);
  std::vector<double> fc;
  for (Index m = 0; m < bank.filters(); ++m) {
    r.filters.push_back(estimate_fc_fb(r.spectra.row(m).transpose(), r.bin_hz));
    fc.push_back(r.filters.back() ? r.filters.back()->fc : 0.0);
  }
  r.order.resize(static_cast<size_t>(bank.filters()));
  std::iota(r.order.begin(), r.order.end(), Index{0});
  std::stable_sort(r.order.begin(), r.order.end(), [&](Index a, Index b) {
    const auto& fa = r.filters[static_cast<size_t>(a)];
    const auto& fb = r.filters[static_cast<size_t>(b)];
    if (fa.has_value() != fb.has_value()) return fa.has_value();
    return fa && fa->fc < fb->fc;
  });
  r.fit = sort_and_fit(fc);
  return r;
}

ActivationMap activation_map(const FilterBank& bank, const Waveform& w, bool subtract_bias) {
  validate(w);
  ActivationMap m;
  m.values = apply(bank, w.samples);
  if (subtract_bias) m.values.colwise() -= bank.bias;
  m.values = m.values.cwiseAbs();
  m.stride = bank.stride;
  m.kernel = bank.kernel();
  m.sample_rate = w.sample_rate;
  return m;
}

CwtComparison compare_with_cwt(const Waveform& w, const FilterBank& bank,
                               const Eigen::Ref<const Eigen::VectorXd>& scales, const WaveletBasis& basis) {
  CwtComparison c;
  c.conv = activation_map(bank, w, true);
  c.cwt = cwt(w, scales, basis, 1);

  const Index cols = c.conv.values.cols();
  c.time_s.resize(cols);
  c.conv_envelope = c.conv.values.colwise().squaredNorm().transpose();
  c.cwt_envelope.resize(cols);
  for (Index i = 0; i < cols; ++i) {
    const Index t = c.conv.center_sample(i);
    c.time_s[i] = static_cast<double>(t) / w.sample_rate;
    c.cwt_envelope[i] = c.cwt.coefficients.col(t).squaredNorm();
  }
  for (Eigen::VectorXd* e : {&c.conv_envelope, &c.cwt_envelope}) {
    const double mx = e->maxCoeff();
    if (mx > 0.0) *e /= mx;
  }
  if (cols >= 2) c.correlation = pearson(c.conv_envelope, c.cwt_envelope);
  return c;
}

}  // namespace wavescope
