#include "wavescope/optim.hpp"

#include <cmath>
#include <limits>

namespace wavescope {

void adam_step(const std::vector<Eigen::VectorXd*>& params, const std::vector<Eigen::VectorXd>& grads,
               AdamState& state, double lr) {
  require(params.size() == grads.size(), "adam_step: params/grads count mismatch");
  if (state.m.empty()) {
    for (const auto* p : params) {
      state.m.push_back(Eigen::VectorXd::Zero(p->size()));
      state.v.push_back(Eigen::VectorXd::Zero(p->size()));
    }
  }
  require(state.m.size() == params.size(), "adam_step: state does not match parameter list");
  for (size_t i = 0; i < params.size(); ++i)
    require(params[i]->size() == grads[i].size() && state.m[i].size() == grads[i].size(),
            "adam_step: shape mismatch");

  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto& g = grads[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseAbs2();
    params[i]->array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + state.epsilon);
  }
}

double lr_at_epoch(const LrSchedule& schedule, int epoch) {
  require(epoch >= 0, "lr_at_epoch: epoch must be >= 0");
  require(schedule.epochs_per_decay >= 1, "lr_at_epoch: epochs_per_decay must be >= 1");
  double lr = schedule.lr;
  for (int k = 0; k < epoch / schedule.epochs_per_decay; ++k) lr = lr / (1.0 + schedule.decay_rate);
  return lr;
}

EarlyStopping::EarlyStopping(int patience, double min_delta)
    : patience_(patience), min_delta_(min_delta), best_(std::numeric_limits<double>::infinity()) {
  require(patience >= 1, "early stopping: patience must be >= 1");
  require(min_delta >= 0.0, "early stopping: min_delta must be >= 0");
}

bool EarlyStopping::update(double loss) {
  if (!seen_ || loss < best_ - min_delta_ * std::abs(best_)) {
    best_ = loss;
    stale_ = 0;
    seen_ = true;
    return false;
  }
  return ++stale_ >= patience_;
}

}  // namespace wavescope
