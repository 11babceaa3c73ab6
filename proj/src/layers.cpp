#include "wavescope/layers.hpp"

#include <cmath>

namespace wavescope {

std::vector<const Eigen::VectorXd*> Layer::params() const {
  auto mut = const_cast<Layer*>(this)->params();
  return {mut.begin(), mut.end()};
}

Index Layer::parameter_count() const {
  Index n = 0;
  for (const auto* p : params()) n += p->size();
  return n;
}

void init_uniform(Eigen::VectorXd& w, Index fan_in, std::mt19937_64& rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Index i = 0; i < w.size(); ++i) w[i] = dist(rng);
}

namespace {

void check_grads(const std::vector<Eigen::VectorXd>& g, const std::vector<const Eigen::VectorXd*>& p) {
  require(g.size() == p.size(), "backward: wrong number of gradient buffers");
  for (size_t i = 0; i < g.size(); ++i)
    require(g[i].size() == p[i]->size(), "backward: gradient buffer shape mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv1d

Conv1d::Conv1d(Index in_channels, Index filters, Index kernel, Index stride)
    : in_(in_channels), out_(filters), k_(kernel), stride_(stride) {
  require(in_ >= 1 && out_ >= 1 && k_ >= 1 && stride_ >= 1, "conv1d: sizes must be >= 1");
  weights_ = Eigen::VectorXd::Zero(out_ * in_ * k_);
  bias_ = Eigen::VectorXd::Zero(out_);
}

void Conv1d::init(std::mt19937_64& rng) {
  init_uniform(weights_, in_ * k_, rng);
  bias_.setZero();
}

Shape Conv1d::output_shape(const Shape& in) const {
  require(in.size() == 2 && in[0] == in_,
          "conv1d: expected input [" + std::to_string(in_) + " x L], got " + shape_string(in));
  require(in[1] >= k_, "conv1d: input length " + std::to_string(in[1]) + " shorter than kernel " +
                           std::to_string(k_));
  return {out_, (in[1] - k_) / stride_ + 1};
}

Tensor Conv1d::forward(const Tensor& x, LayerCache* cache) const {
  const Shape out_shape = output_shape(x.shape);
  const Index n_out = out_shape[1];
  const auto xm = x.matrix();

  Eigen::MatrixXd cols(in_ * k_, n_out);
  for (Index i = 0; i < n_out; ++i)
    for (Index c = 0; c < in_; ++c)
      cols.col(i).segment(c * k_, k_) = xm.row(c).segment(i * stride_, k_).transpose();

  Tensor y(out_shape);
  auto ym = y.matrix();
  ym.noalias() = weight_matrix() * cols;
  ym.colwise() += bias_;

  if (cache) {
    cache->input_shape = x.shape;
    cache->columns = std::move(cols);
  }
  return y;
}

Tensor Conv1d::backward(const Tensor& grad_out, const LayerCache& cache,
                        std::vector<Eigen::VectorXd>& param_grads, bool need_input_grad) const {
  check_grads(param_grads, Layer::params());
  const Shape expect = output_shape(cache.input_shape);
  require(grad_out.shape == expect, "conv1d backward: grad_out shape " + shape_string(grad_out.shape) +
                                        " != " + shape_string(expect));
  const auto g = grad_out.matrix();
  Eigen::Map<RowMatrixXd> gw(param_grads[0].data(), out_, in_ * k_);
  gw.noalias() += g * cache.columns.transpose();
  param_grads[1] += g.rowwise().sum();

  if (!need_input_grad) return {};
  const Eigen::MatrixXd gcols = weight_matrix().transpose() * g;
  Tensor gx(cache.input_shape);
  auto gxm = gx.matrix();
  for (Index i = 0; i < g.cols(); ++i)
    for (Index c = 0; c < in_; ++c)
      gxm.row(c).segment(i * stride_, k_) += gcols.col(i).segment(c * k_, k_).transpose();
  return gx;
}

Tensor conv1d_forward(const Conv1d& layer, const Tensor& x) { return layer.forward(x, nullptr); }

Conv1dGrads conv1d_backward(const Conv1d& layer, const Tensor& x, const Tensor& grad_out) {
  LayerCache cache;
  layer.forward(x, &cache);
  std::vector<Eigen::VectorXd> pg{Eigen::VectorXd::Zero(layer.filters() * layer.in_channels() * layer.kernel()),
                                  Eigen::VectorXd::Zero(layer.filters())};
  Conv1dGrads out;
  out.grad_x = layer.backward(grad_out, cache, pg, true);
  out.grad_w = Eigen::Map<RowMatrixXd>(pg[0].data(), layer.filters(), layer.in_channels() * layer.kernel());
  out.grad_b = pg[1];
  return out;
}

// ---------------------------------------------------------------------------
// Conv2d

Conv2d::Conv2d(Index in_channels, Index filters, Index kh, Index kw)
    : in_(in_channels), out_(filters), kh_(kh), kw_(kw) {
  require(in_ >= 1 && out_ >= 1 && kh_ >= 1 && kw_ >= 1, "conv2d: sizes must be >= 1");
  weights_ = Eigen::VectorXd::Zero(out_ * in_ * kh_ * kw_);
  bias_ = Eigen::VectorXd::Zero(out_);
}

void Conv2d::init(std::mt19937_64& rng) {
  init_uniform(weights_, in_ * kh_ * kw_, rng);
  bias_.setZero();
}

Shape Conv2d::output_shape(const Shape& in) const {
  require(in.size() == 3 && in[0] == in_,
          "conv2d: expected input [" + std::to_string(in_) + " x H x W], got " + shape_string(in));
  require(in[1] >= kh_ && in[2] >= kw_, "conv2d: input " + shape_string(in) + " smaller than kernel");
  return {out_, in[1] - kh_ + 1, in[2] - kw_ + 1};
}

Tensor Conv2d::forward(const Tensor& x, LayerCache* cache) const {
  const Shape os = output_shape(x.shape);
  const Index h = x.shape[1], w = x.shape[2];
  const Index oh = os[1], ow = os[2];
  const double* xd = x.values.data();

  Eigen::MatrixXd cols(in_ * kh_ * kw_, oh * ow);
  for (Index oy = 0; oy < oh; ++oy)
    for (Index ox = 0; ox < ow; ++ox) {
      double* dst = cols.col(oy * ow + ox).data();
      for (Index c = 0; c < in_; ++c)
        for (Index ky = 0; ky < kh_; ++ky) {
          const double* src = xd + (c * h + oy + ky) * w + ox;
          for (Index kx = 0; kx < kw_; ++kx) *dst++ = src[kx];
        }
    }

  Tensor y(os);
  auto ym = y.matrix();
  ym.noalias() = weight_matrix() * cols;
  ym.colwise() += bias_;
  if (cache) {
    cache->input_shape = x.shape;
    cache->columns = std::move(cols);
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& grad_out, const LayerCache& cache,
                        std::vector<Eigen::VectorXd>& param_grads, bool need_input_grad) const {
  check_grads(param_grads, Layer::params());
  const Shape os = output_shape(cache.input_shape);
  require(grad_out.shape == os, "conv2d backward: grad_out shape mismatch");
  const auto g = grad_out.matrix();
  Eigen::Map<RowMatrixXd> gw(param_grads[0].data(), out_, in_ * kh_ * kw_);
  gw.noalias() += g * cache.columns.transpose();
  param_grads[1] += g.rowwise().sum();

  if (!need_input_grad) return {};
  const Index h = cache.input_shape[1], w = cache.input_shape[2];
  const Index oh = os[1], ow = os[2];
  const Eigen::MatrixXd gcols = weight_matrix().transpose() * g;
  Tensor gx(cache.input_shape);
  double* gd = gx.values.data();
  for (Index oy = 0; oy < oh; ++oy)
    for (Index ox = 0; ox < ow; ++ox) {
      const double* src = gcols.col(oy * ow + ox).data();
      for (Index c = 0; c < in_; ++c)
        for (Index ky = 0; ky < kh_; ++ky) {
          double* dst = gd + (c * h + oy + ky) * w + ox;
          for (Index kx = 0; kx < kw_; ++kx) dst[kx] += *src++;
        }
    }
  return gx;
}

Tensor conv2d_forward(const Conv2d& layer, const Tensor& x) { return layer.forward(x, nullptr); }

Conv2dGrads conv2d_backward(const Conv2d& layer, const Tensor& x, const Tensor& grad_out) {
  LayerCache cache;
  layer.forward(x, &cache);
  const Index per = layer.in_channels() * layer.kernel_h() * layer.kernel_w();
  std::vector<Eigen::VectorXd> pg{Eigen::VectorXd::Zero(layer.filters() * per),
                                  Eigen::VectorXd::Zero(layer.filters())};
  Conv2dGrads out;
  out.grad_x = layer.backward(grad_out, cache, pg, true);
  out.grad_w = Eigen::Map<RowMatrixXd>(pg[0].data(), layer.filters(), per);
  out.grad_b = pg[1];
  return out;
}

// ---------------------------------------------------------------------------
// ReLU

Tensor ReLU::forward(const Tensor& x, LayerCache* cache) const {
  Tensor y(x.shape, x.values.cwiseMax(0.0));
  if (cache) {
    cache->input_shape = x.shape;
    cache->input = x.values;
  }
  return y;
}

Tensor ReLU::backward(const Tensor& grad_out, const LayerCache& cache,
                      std::vector<Eigen::VectorXd>&, bool need_input_grad) const {
  require(grad_out.shape == cache.input_shape, "relu backward: shape mismatch");
  if (!need_input_grad) return {};
  return Tensor(cache.input_shape,
                (cache.input.array() > 0.0).select(grad_out.values, 0.0));
}

// ---------------------------------------------------------------------------
// Max pooling

MaxPool1d::MaxPool1d(Index size) : size_(size) { require(size_ >= 1, "maxpool1d: size must be >= 1"); }

Shape MaxPool1d::output_shape(const Shape& in) const {
  require(in.size() == 2, "maxpool1d: expected [C x L] input, got " + shape_string(in));
  require(in[1] >= size_, "maxpool1d: input length shorter than window");
  return {in[0], in[1] / size_};
}

Tensor MaxPool1d::forward(const Tensor& x, LayerCache* cache) const {
  const Shape os = output_shape(x.shape);
  const auto xm = x.matrix();
  Tensor y(os);
  auto ym = y.matrix();
  std::vector<Index> arg(static_cast<size_t>(y.size()));
  for (Index c = 0; c < os[0]; ++c)
    for (Index i = 0; i < os[1]; ++i) {
      Index best = i * size_;
      for (Index j = best + 1; j < (i + 1) * size_; ++j)
        if (xm(c, j) > xm(c, best)) best = j;
      ym(c, i) = xm(c, best);
      arg[static_cast<size_t>(c * os[1] + i)] = c * x.shape[1] + best;
    }
  if (cache) {
    cache->input_shape = x.shape;
    cache->argmax = std::move(arg);
  }
  return y;
}

Tensor MaxPool1d::backward(const Tensor& grad_out, const LayerCache& cache,
                           std::vector<Eigen::VectorXd>&, bool need_input_grad) const {
  require(grad_out.shape == output_shape(cache.input_shape), "maxpool1d backward: shape mismatch");
  if (!need_input_grad) return {};
  Tensor gx(cache.input_shape);
  for (Index i = 0; i < grad_out.size(); ++i) gx.values[cache.argmax[static_cast<size_t>(i)]] += grad_out.values[i];
  return gx;
}

MaxPool2d::MaxPool2d(Index size) : size_(size) { require(size_ >= 1, "maxpool2d: size must be >= 1"); }

Shape MaxPool2d::output_shape(const Shape& in) const {
  require(in.size() == 3, "maxpool2d: expected [C x H x W] input, got " + shape_string(in));
  require(in[1] >= size_ && in[2] >= size_, "maxpool2d: input smaller than window");
  return {in[0], in[1] / size_, in[2] / size_};
}

Tensor MaxPool2d::forward(const Tensor& x, LayerCache* cache) const {
  const Shape os = output_shape(x.shape);
  const Index h = x.shape[1], w = x.shape[2];
  Tensor y(os);
  std::vector<Index> arg(static_cast<size_t>(y.size()));
  Index o = 0;
  for (Index c = 0; c < os[0]; ++c)
    for (Index oy = 0; oy < os[1]; ++oy)
      for (Index ox = 0; ox < os[2]; ++ox, ++o) {
        Index best = (c * h + oy * size_) * w + ox * size_;
        // Row-major scan order decides ties: earliest flat index wins.
        for (Index dy = 0; dy < size_; ++dy)
          for (Index dx = 0; dx < size_; ++dx) {
            const Index idx = (c * h + oy * size_ + dy) * w + ox * size_ + dx;
            if (x.values[idx] > x.values[best]) best = idx;
          }
        y.values[o] = x.values[best];
        arg[static_cast<size_t>(o)] = best;
      }
  if (cache) {
    cache->input_shape = x.shape;
    cache->argmax = std::move(arg);
  }
  return y;
}

Tensor MaxPool2d::backward(const Tensor& grad_out, const LayerCache& cache,
                           std::vector<Eigen::VectorXd>&, bool need_input_grad) const {
  require(grad_out.shape == output_shape(cache.input_shape), "maxpool2d backward: shape mismatch");
  if (!need_input_grad) return {};
  Tensor gx(cache.input_shape);
  for (Index i = 0; i < grad_out.size(); ++i) gx.values[cache.argmax[static_cast<size_t>(i)]] += grad_out.values[i];
  return gx;
}

// ---------------------------------------------------------------------------
// Dense

Dense::Dense(Index inputs, Index outputs) : in_(inputs), out_(outputs) {
  require(in_ >= 1 && out_ >= 1, "dense: sizes must be >= 1");
  weights_ = Eigen::VectorXd::Zero(out_ * in_);
  bias_ = Eigen::VectorXd::Zero(out_);
}

void Dense::init(std::mt19937_64& rng) {
  init_uniform(weights_, in_, rng);
  bias_.setZero();
}

Shape Dense::output_shape(const Shape& in) const {
  require(shape_size(in) == in_, "dense: expected " + std::to_string(in_) + " inputs, got " + shape_string(in));
  return {out_};
}

Tensor Dense::forward(const Tensor& x, LayerCache* cache) const {
  const Shape os = output_shape(x.shape);
  Tensor y(os, weight_matrix() * x.values + bias_);
  if (cache) {
    cache->input_shape = x.shape;
    cache->input = x.values;
  }
  return y;
}

Tensor Dense::backward(const Tensor& grad_out, const LayerCache& cache,
                       std::vector<Eigen::VectorXd>& param_grads, bool need_input_grad) const {
  check_grads(param_grads, Layer::params());
  require(grad_out.size() == out_, "dense backward: grad_out size mismatch");
  Eigen::Map<RowMatrixXd> gw(param_grads[0].data(), out_, in_);
  gw.noalias() += grad_out.values * cache.input.transpose();
  param_grads[1] += grad_out.values;
  if (!need_input_grad) return {};
  return Tensor(cache.input_shape, weight_matrix().transpose() * grad_out.values);
}

// ---------------------------------------------------------------------------

Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits) {
  require(logits.size() >= 1, "softmax: empty logits");
  Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

SoftmaxXent softmax_xent(const Eigen::Ref<const Eigen::VectorXd>& logits, Index label) {
  require(label >= 0 && label < logits.size(), "softmax_xent: label out of range");
  SoftmaxXent r;
  const double mx = logits.maxCoeff();
  const double lse = mx + std::log((logits.array() - mx).exp().sum());
  r.loss = lse - logits[label];
  r.probs = (logits.array() - lse).exp();
  r.grad = r.probs;
  r.grad[label] -= 1.0;
  return r;
}

}  // namespace wavescope
