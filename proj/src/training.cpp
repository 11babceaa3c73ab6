#include "wavescope/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace wavescope {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::max_epochs: return "max_epochs";
    case StopReason::patience: return "patience";
    case StopReason::nan: return "nan";
  }
  return "?";
}

StopReason stop_reason_from_string(const std::string& s) {
  if (s == "max_epochs") return StopReason::max_epochs;
  if (s == "patience") return StopReason::patience;
  if (s == "nan") return StopReason::nan;
  throw FormatError("unknown stop reason: " + s);
}

bool operator==(const EpochRecord& a, const EpochRecord& b) {
  return a.epoch == b.epoch && a.loss == b.loss && a.accuracy == b.accuracy && a.lr == b.lr;
}

bool TrainHistory::operator==(const TrainHistory& o) const {
  return epochs == o.epochs && stop == o.stop && diagnostic == o.diagnostic;
}

TrainHistory train(Model& model, std::span<const Sample> data, const TrainConfig& cfg,
                   const EpochCallback& on_epoch) {
  require(!data.empty(), "train: empty dataset");
  require(cfg.max_epochs >= 1, "train: max_epochs must be >= 1");
  require(cfg.batch_size >= 1, "train: batch_size must be >= 1");
  require(cfg.lr >= 0.0 && cfg.decay >= 0.0, "train: lr and decay must be >= 0");
  const Index n_classes = shape_size(model.output_shape());
  for (const auto& s : data)
    require(s.label >= 0 && s.label < n_classes, "train: label out of range");

  TrainHistory history;
  EarlyStopping stopper(cfg.patience, cfg.min_delta);
  AdamState adam;
  std::mt19937_64 rng(cfg.seed);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  auto params = model.parameters();
  auto grads = model.zero_grads();
  std::vector<Eigen::VectorXd> flat;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double lr = lr_at_epoch(cfg.schedule(), epoch);
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    size_t correct = 0;
    Eigen::VectorXd probs;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      const size_t stop = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      for (auto& layer : grads)
        for (auto& g : layer) g.setZero();
      for (size_t i = start; i < stop; ++i) {
        const Sample& s = data[order[i]];
        const double loss = model.loss_and_grad(s.input, s.label, grads, &probs);
        loss_sum += loss;
        if (argmax(probs) == s.label) ++correct;
      }
      if (!std::isfinite(loss_sum)) break;

      const double scale = 1.0 / static_cast<double>(stop - start);
      flat.clear();
      for (auto& layer : grads)
        for (auto& g : layer) flat.push_back(g * scale);
      adam_step(params, flat, adam, lr);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss_sum / static_cast<double>(data.size());
    rec.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    rec.lr = lr;
    history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (!std::isfinite(rec.loss)) {
      history.stop = StopReason::nan;
      history.diagnostic = "non-finite training loss at epoch " + std::to_string(epoch) +
                           " (lr " + std::to_string(lr) + ")";
      return history;
    }
    if (stopper.update(rec.loss)) {
      history.stop = StopReason::patience;
      history.diagnostic = "loss did not improve for " + std::to_string(cfg.patience) + " epochs";
      return history;
    }
  }
  history.stop = StopReason::max_epochs;
  return history;
}

double accuracy(const Model& model, std::span<const Sample> data) {
  if (data.empty()) return 0.0;
  size_t correct = 0;
  for (const auto& s : data)
    if (argmax(predict(model, s.input)) == s.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace wavescope
