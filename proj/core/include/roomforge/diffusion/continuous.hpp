#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "roomforge/nn/train.hpp"
#include "roomforge/nn/transformer.hpp"
#include "roomforge/rng.hpp"
#include "roomforge/types.hpp"

namespace roomforge::diffusion {

using nn::SceneTransformer;
using nn::Tape;
using nn::Tensor;

// Variance-preserving Gaussian schedule over few, aggressive steps.  The
// betas rise linearly, so almost no signal survives at the horizon
// (sqrt(alpha_bar_T) ~ 5e-3) and sampling stays cheap.
struct LayoutSchedule {
  int T = 0;
  std::vector<double> beta;       // [T+1], 1-indexed
  std::vector<double> alpha;      // 1 - beta
  std::vector<double> alpha_bar;  // running product; alpha_bar[0] = 1

  static LayoutSchedule make(int T = 10, double beta_start = 0.15,
                             double beta_end = 0.95);
};

// 8 layout channels per object: translation xyz, half extents xyz, then the
// rotation written as cos/sin of the yaw
inline constexpr int kLayoutChannels = 8;

Tensor layouts_to_rows(const std::vector<Layout>& layouts);
std::vector<Layout> rows_to_layouts(const Tensor& rows);

// z-scores translation and size channels over a training corpus; the
// rotation channels are already unit-scale and pass through untouched
struct LayoutNormStats {
  std::array<double, kLayoutChannels> mean{};
  std::array<double, kLayoutChannels> stdev{};

  static LayoutNormStats fit(const std::vector<Tensor>& row_blocks);
  [[nodiscard]] Tensor normalize(const Tensor& raw) const;
  [[nodiscard]] Tensor denormalize(const Tensor& normed) const;
  [[nodiscard]] std::string to_json() const;
  static LayoutNormStats from_json(const std::string& text);
};

// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps, elementwise
Tensor corrupt_layout(const Tensor& x0, const LayoutSchedule& schedule, int t,
                      Rng& rng);

// mean squared error per object, averaged over the scene's objects
Tape::Id layout_loss(Tape& tape, Tape::Id predicted_x0, const Tensor& clean_x0);

struct LayoutExample {
  nn::GraphTokens graph;       // clean attribute tokens
  Tensor rows;                 // [n, 8] raw (unnormalized) layout rows
  std::vector<double> lambda;  // empty = unconditional
};

struct LayoutTrainConfig {
  int steps = 3000;
  int batch_size = 32;
  double cond_dropout = 0.2;
  nn::OptimConfig optim{};
  int log_every = 200;
};

double train_layout_model(SceneTransformer& model,
                          const std::vector<LayoutExample>& data,
                          const LayoutNormStats& norm, const LayoutTrainConfig& cfg,
                          Rng& rng, const std::function<void(int, double)>& progress = {});

// DDPM ancestral sampling with x0 prediction.  Rows flagged in `frozen` are
// pinned: during the walk they carry freshly noised copies of their given
// values, and the returned rows reproduce the frozen inputs bit for bit.
Tensor sample_layout_rows(SceneTransformer& model, const nn::GraphTokens& graph,
                          const std::vector<double>& lambda,
                          const LayoutNormStats& norm, const LayoutSchedule& schedule,
                          Rng& rng, const Tensor* frozen_rows = nullptr,
                          const std::vector<bool>* frozen = nullptr);

}  // namespace roomforge::diffusion
