#include "roomforge/nn/train.hpp"

#include <cmath>

#include "roomforge/rng.hpp"

namespace roomforge::nn {

void AdamW::step(ParamStore& store) {
  ++t_;
  if (cfg_.grad_clip > 0.0) {
    double norm2 = 0.0;
    for (int i = 0; i < store.size(); ++i)
      for (double gv : store[i].grad.v) norm2 += gv * gv;
    double norm = std::sqrt(norm2);
    if (norm > cfg_.grad_clip) {
      double s = cfg_.grad_clip / norm;
      for (int i = 0; i < store.size(); ++i)
        for (double& gv : store[i].grad.v) gv *= s;
    }
  }

  double c1 = 1.0 - std::pow(cfg_.beta1, t_);
  double c2 = 1.0 - std::pow(cfg_.beta2, t_);
  for (int i = 0; i < store.size(); ++i) {
    Param& p = store[i];
    for (size_t k = 0; k < p.value.v.size(); ++k) {
      double gk = p.grad.v[k];
      p.adam_m.v[k] = cfg_.beta1 * p.adam_m.v[k] + (1.0 - cfg_.beta1) * gk;
      p.adam_v.v[k] = cfg_.beta2 * p.adam_v.v[k] + (1.0 - cfg_.beta2) * gk * gk;
      double mhat = p.adam_m.v[k] / c1;
      double vhat = p.adam_v.v[k] / c2;
      p.value.v[k] -= cfg_.lr * (mhat / (std::sqrt(vhat) + cfg_.eps) +
                                 cfg_.weight_decay * p.value.v[k]);
      p.ema.v[k] = cfg_.ema_decay * p.ema.v[k] + (1.0 - cfg_.ema_decay) * p.value.v[k];
    }
    std::fill(p.grad.v.begin(), p.grad.v.end(), 0.0);
  }
}

GradCheckReport gradient_check(ParamStore& store,
                               const std::function<Tape::Id(Tape&)>& build,
                               int samples_per_param, double h,
                               double denom_floor, std::uint64_t seed) {
  store.zero_grads();
  {
    Tape tape(&store);
    tape.backward(build(tape));
  }

  auto eval = [&]() {
    Tape tape(&store);
    return tape.val(build(tape)).v[0];
  };

  GradCheckReport report;
  double err_sum = 0.0;
  Rng rng(seed);
  for (int p = 0; p < store.size(); ++p) {
    Param& param = store[p];
    size_t count = param.value.size();
    for (int s = 0; s < samples_per_param && s < static_cast<int>(count); ++s) {
      size_t k = count <= static_cast<size_t>(samples_per_param)
                     ? static_cast<size_t>(s)
                     : rng.index(count);
      double orig = param.value.v[k];
      param.value.v[k] = orig + h;
      double up = eval();
      param.value.v[k] = orig - h;
      double dn = eval();
      param.value.v[k] = orig;
      double fd = (up - dn) / (2.0 * h);
      double ad = param.grad.v[k];
      double rel = std::abs(ad - fd) /
                   std::max(denom_floor, std::max(std::abs(ad), std::abs(fd)));
      err_sum += rel;
      ++report.checked;
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst_param = param.name;
      }
    }
  }
  if (report.checked > 0) report.mean_rel_err = err_sum / report.checked;
  store.zero_grads();
  return report;
}

}  // namespace roomforge::nn
