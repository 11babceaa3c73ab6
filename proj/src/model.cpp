#include "wavescope/model.hpp"

namespace wavescope {

const char* to_string(Pipeline p) { return p == Pipeline::raw ? "raw" : "mfcc"; }

Pipeline pipeline_from_string(const std::string& s) {
  if (s == "raw") return Pipeline::raw;
  if (s == "mfcc") return Pipeline::mfcc;
  throw ContractError("unknown pipeline: " + s);
}

Shape ModelConfig::input_shape() const {
  if (arch == Pipeline::raw) return {1, input_length};
  return {1, n_mfcc, n_frames};
}

Model::Model(ModelConfig cfg) : cfg_(cfg), input_shape_(cfg.input_shape()) {}

Model::Model(const Model& other) : cfg_(other.cfg_), input_shape_(other.input_shape_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Model& Model::operator=(const Model& other) {
  if (this != &other) {
    Model tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

Shape Model::output_shape() const {
  Shape s = input_shape_;
  for (const auto& l : layers_) s = l->output_shape(s);
  return s;
}

void Model::add(std::unique_ptr<Layer> layer) {
  // Validates that the stack stays shape-consistent.
  Shape s = output_shape();
  layer->output_shape(s);
  layers_.push_back(std::move(layer));
}

Tensor Model::forward(const Tensor& x) const {
  require(x.shape == input_shape_, "model: input shape " + shape_string(x.shape) + " != " +
                                       shape_string(input_shape_));
  Tensor h = x;
  for (const auto& l : layers_) h = l->forward(h, nullptr);
  return h;
}

double Model::loss_and_grad(const Tensor& x, Index label, std::vector<std::vector<Eigen::VectorXd>>& grads,
                            Eigen::VectorXd* probs) const {
  require(x.shape == input_shape_, "model: input shape " + shape_string(x.shape) + " != " +
                                       shape_string(input_shape_));
  require(grads.size() == layers_.size(), "model: gradient layout mismatch");
  std::vector<LayerCache> caches(layers_.size());
  Tensor h = x;
  for (size_t i = 0; i < layers_.size(); ++i) h = layers_[i]->forward(h, &caches[i]);

  const SoftmaxXent sx = softmax_xent(h.values, label);
  if (probs) *probs = sx.probs;
  Tensor g(h.shape, sx.grad);
  for (size_t i = layers_.size(); i-- > 0;)
    g = layers_[i]->backward(g, caches[i], grads[i], i > 0);
  return sx.loss;
}

std::vector<std::vector<Eigen::VectorXd>> Model::zero_grads() const {
  std::vector<std::vector<Eigen::VectorXd>> g;
  g.reserve(layers_.size());
  for (const auto& l : layers_) {
    std::vector<Eigen::VectorXd> per;
    for (const auto* p : std::as_const(*l).params()) per.push_back(Eigen::VectorXd::Zero(p->size()));
    g.push_back(std::move(per));
  }
  return g;
}

std::vector<Eigen::VectorXd*> Model::parameters() {
  std::vector<Eigen::VectorXd*> out;
  for (auto& l : layers_)
    for (auto* p : l->params()) out.push_back(p);
  return out;
}

Index Model::parameter_count() const {
  Index n = 0;
  for (const auto& l : layers_) n += l->parameter_count();
  return n;
}

FilterBank Model::filter_bank() const {
  require(!layers_.empty(), "model: no layers");
  const auto* conv = dynamic_cast<const Conv1d*>(layers_.front().get());
  require(conv != nullptr, "model: first layer is not a Conv1d");
  return FilterBank::from_layer(*conv, cfg_.sample_rate);
}

Model build_raw_model(const ModelConfig& cfg) {
  require(cfg.arch == Pipeline::raw, "build_raw_model: config is not a raw pipeline");
  require(cfg.f1 >= 1 && cfg.nb_f >= 1 && cfg.stride >= 1, "build_raw_model: f1, nb_f, stride must be >= 1");
  require(cfg.n_classes >= 2 && cfg.hidden >= 1, "build_raw_model: need >= 2 classes");

  std::mt19937_64 rng(cfg.seed);
  Model m(cfg);
  auto conv = [&](Index in, Index out, Index k, Index stride) {
    auto l = std::make_unique<Conv1d>(in, out, k, stride);
    l->init(rng);
    return l;
  };
  m.add(conv(1, cfg.nb_f, cfg.f1, cfg.stride));
  m.add(std::make_unique<ReLU>());
  m.add(std::make_unique<MaxPool1d>(8));
  m.add(conv(cfg.nb_f, 2 * cfg.nb_f, 5, 1));
  m.add(std::make_unique<ReLU>());
  m.add(std::make_unique<MaxPool1d>(4));
  m.add(conv(2 * cfg.nb_f, 2 * cfg.nb_f, 5, 1));
  m.add(std::make_unique<ReLU>());
  m.add(std::make_unique<MaxPool1d>(4));
  auto hidden = std::make_unique<Dense>(shape_size(m.output_shape()), cfg.hidden);
  hidden->init(rng);
  m.add(std::move(hidden));
  m.add(std::make_unique<ReLU>());
  auto head = std::make_unique<Dense>(cfg.hidden, cfg.n_classes);
  head->init(rng);
  m.add(std::move(head));
  return m;
}

Model build_mfcc_model(const ModelConfig& cfg) {
  require(cfg.arch == Pipeline::mfcc, "build_mfcc_model: config is not an mfcc pipeline");
  require(cfg.n_mfcc >= 1 && cfg.n_frames >= 1, "build_mfcc_model: feature shape must be set");
  require(cfg.n_classes >= 2 && cfg.vgg_channels >= 1, "build_mfcc_model: bad sizes");
  // Two blocks of (3x3 conv, 3x3 conv, 2x2 pool) need at least 16 rows and columns.
  require(cfg.n_mfcc >= 16 && cfg.n_frames >= 16,
          "build_mfcc_model: feature map " + std::to_string(cfg.n_mfcc) + "x" + std::to_string(cfg.n_frames) +
              " is smaller than the 16x16 minimum");

  std::mt19937_64 rng(cfg.seed);
  Model m(cfg);
  auto conv = [&](Index in, Index out) {
    auto l = std::make_unique<Conv2d>(in, out, 3, 3);
    l->init(rng);
    return l;
  };
  const Index c1 = cfg.vgg_channels, c2 = 2 * cfg.vgg_channels;
  m.add(conv(1, c1));
  m.add(std::make_unique<ReLU>());
  m.add(conv(c1, c1));
  m.add(std::make_unique<ReLU>());
  m.add(std::make_unique<MaxPool2d>(2));
  m.add(conv(c1, c2));
  m.add(std::make_unique<ReLU>());
  m.add(conv(c2, c2));
  m.add(std::make_unique<ReLU>());
  m.add(std::make_unique<MaxPool2d>(2));
  auto hidden = std::make_unique<Dense>(shape_size(m.output_shape()), cfg.hidden);
  hidden->init(rng);
  m.add(std::move(hidden));
  m.add(std::make_unique<ReLU>());
  auto head = std::make_unique<Dense>(cfg.hidden, cfg.n_classes);
  head->init(rng);
  m.add(std::move(head));
  return m;
}

Model build_model(const ModelConfig& cfg) {
  return cfg.arch == Pipeline::raw ? build_raw_model(cfg) : build_mfcc_model(cfg);
}

Eigen::VectorXd predict(const Model& model, const Tensor& x) { return softmax(model.forward(x).values); }

std::vector<Eigen::VectorXd> predict(const Model& model, const std::vector<Tensor>& batch) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(batch.size());
  for (const auto& x : batch) out.push_back(predict(model, x));
  return out;
}

Index argmax(const Eigen::Ref<const Eigen::VectorXd>& v) {
  require(v.size() >= 1, "argmax: empty vector");
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace wavescope
