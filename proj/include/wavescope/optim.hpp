#pragma once

#include "wavescope/common.hpp"

#include <vector>

namespace wavescope {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  std::vector<Eigen::VectorXd> m;
  std::vector<Eigen::VectorXd> v;
};

/// One bias-corrected Adam update. Moment buffers are sized lazily on the
/// first call and must match the parameter shapes afterwards.
void adam_step(const std::vector<Eigen::VectorXd*>& params, const std::vector<Eigen::VectorXd>& grads,
               AdamState& state, double lr);

/// lr = lr / (1 + decay_rate), applied once every `epochs_per_decay` epochs.
struct LrSchedule {
  double lr = 0.001;
  double decay_rate = 0.1;
  int epochs_per_decay = 3;
};

double lr_at_epoch(const LrSchedule& schedule, int epoch);

/// Stops once the best loss has failed to improve by a relative `min_delta`
/// for `patience` consecutive epochs.
class EarlyStopping {
public:
  EarlyStopping(int patience, double min_delta);

  /// Records one epoch's loss; true when training should stop.
  bool update(double loss);

  double best() const { return best_; }
  int stale_epochs() const { return stale_; }

private:
  int patience_;
  double min_delta_;
  double best_;
  int stale_ = 0;
  bool seen_ = false;
};

}  // namespace wavescope
