#pragma once

#include <functional>
#include <string>

#include "roomforge/nn/tape.hpp"

namespace roomforge::nn {

struct OptimConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled
  double ema_decay = 0.995;
  double grad_clip = 1.0;  // global-norm clip; non-positive disables
};

// AdamW with decoupled weight decay; step() consumes and clears the
// accumulated grads and refreshes the EMA shadow weights
class AdamW {
 public:
  explicit AdamW(OptimConfig cfg) : cfg_(cfg) {}

  void step(ParamStore& store);
  [[nodiscard]] int iterations() const { return t_; }
  [[nodiscard]] const OptimConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  OptimConfig cfg_;
  int t_ = 0;
};

// swaps live weights with their EMA shadow for the guard's lifetime, so
// sampling code can run on averaged weights without copying the store
class EmaGuard {
 public:
  explicit EmaGuard(ParamStore& store) : store_(store) { swap(); }
  ~EmaGuard() { swap(); }
  EmaGuard(const EmaGuard&) = delete;
  EmaGuard& operator=(const EmaGuard&) = delete;

 private:
  void swap() {
    for (int i = 0; i < store_.size(); ++i)
      store_[i].value.v.swap(store_[i].ema.v);
  }
  ParamStore& store_;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  int checked = 0;
  std::string worst_param;
};

// Central-difference referee over a subsample of each parameter block.
// rel err = |ad - fd| / max(floor, |ad|, |fd|), so near-zero pairs are
// compared on an absolute scale.
GradCheckReport gradient_check(ParamStore& store,
                               const std::function<Tape::Id(Tape&)>& build,
                               int samples_per_param = 4, double h = 1e-4,
                               double denom_floor = 1e-4,
                               std::uint64_t seed = 1234);

}  // namespace roomforge::nn
