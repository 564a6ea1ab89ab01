#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "roomforge/nn/tensor.hpp"
#include "roomforge/rng.hpp"

namespace roomforge::nn {

// one learnable matrix plus its optimizer and averaging state
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;    // accumulated by Tape::backward, cleared by the optimizer step
  Tensor adam_m;
  Tensor adam_v;
  Tensor ema;     // exponential moving average used for sampling
};

class ParamStore {
 public:
  int add(std::string name, Tensor init) {
    Param p;
    p.name = std::move(name);
    p.grad = Tensor::zeros(init.rows, init.cols);
    p.adam_m = Tensor::zeros(init.rows, init.cols);
    p.adam_v = Tensor::zeros(init.rows, init.cols);
    p.ema = init;
    p.value = std::move(init);
    params_.push_back(std::move(p));
    return static_cast<int>(params_.size()) - 1;
  }

  [[nodiscard]] int size() const { return static_cast<int>(params_.size()); }
  Param& operator[](int i) { return params_[static_cast<size_t>(i)]; }
  const Param& operator[](int i) const { return params_[static_cast<size_t>(i)]; }

  [[nodiscard]] size_t scalar_count() const {
    size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

  void zero_grads() {
    for (auto& p : params_)
      std::fill(p.grad.v.begin(), p.grad.v.end(), 0.0);
  }

 private:
  std::vector<Param> params_;
};

// scaled Gaussian init, the usual fan-in normalization
inline Tensor random_init(Rng& rng, int rows, int cols, double scale = -1.0) {
  Tensor t(rows, cols);
  if (scale < 0.0) scale = 1.0 / std::sqrt(static_cast<double>(rows));
  for (double& x : t.v) x = rng.normal() * scale;
  return t;
}

}  // namespace roomforge::nn
