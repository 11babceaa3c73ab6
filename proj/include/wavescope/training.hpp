#pragma once

#include "wavescope/model.hpp"
#include "wavescope/optim.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace wavescope {

struct Sample {
  Tensor input;
  Index label = 0;
};

struct TrainConfig {
  double lr = 0.001;
  double decay = 0.1;
  int epochs_per_decay = 3;
  int max_epochs = 30;
  int patience = 3;
  double min_delta = 1e-4;  // relative improvement of the best loss
  int batch_size = 16;
  std::uint64_t seed = 0;

  LrSchedule schedule() const { return {lr, decay, epochs_per_decay}; }
};

enum class StopReason { max_epochs, patience, nan };
const char* to_string(StopReason r);
StopReason stop_reason_from_string(const std::string& s);

struct EpochRecord {
  int epoch = 0;  // 0-based
  double loss = 0.0;
  double accuracy = 0.0;
  double lr = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  StopReason stop = StopReason::max_epochs;
  std::string diagnostic;

  bool operator==(const TrainHistory&) const;
};

bool operator==(const EpochRecord& a, const EpochRecord& b);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on softmax cross-entropy with the stepwise lr decay and
/// early stopping on the mean training loss. The shuffle sequence is drawn
/// from cfg.seed, so identical inputs give identical histories. A non-finite
/// loss stops training with StopReason::nan and a diagnostic message.
TrainHistory train(Model& model, std::span<const Sample> data, const TrainConfig& cfg,
                   const EpochCallback& on_epoch = {});

/// Fraction of samples whose argmax prediction equals the label.
double accuracy(const Model& model, std::span<const Sample> data);

}  // namespace wavescope
