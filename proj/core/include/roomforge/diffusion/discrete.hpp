#pragma once

#include <functional>
#include <vector>

#include "roomforge/nn/train.hpp"
#include "roomforge/nn/transformer.hpp"
#include "roomforge/rng.hpp"

namespace roomforge::diffusion {

using nn::GraphTokens;
using nn::SceneTransformer;
using nn::Tape;

// Absorbing-mask corruption over graph attributes.  One step t-1 -> t masks
// each surviving token with probability 1/(T-t+1), which telescopes to an
// exactly linear marginal: P(masked at t) = t/T.
struct MaskSchedule {
  int T = 100;
  [[nodiscard]] double step_mask_prob(int t) const { return 1.0 / (T - t + 1); }
  [[nodiscard]] double masked_marginal(int t) const {
    return static_cast<double>(t) / T;
  }
  // fraction of still-masked tokens revealed when stepping t -> t-1
  [[nodiscard]] double reveal_prob(int t) const { return 1.0 / t; }
};

// partially specified graph; -1 entries are free, fixed entries are anchored
// and survive corruption and sampling untouched
struct GraphTemplate {
  int n = 0;
  std::vector<int> categories;
  std::vector<int> features;
  std::vector<int> actions;
  std::vector<int> relations;  // n*n; diagonal is structural and never sampled

  static GraphTemplate free_graph(int n);
};

// draws x_t ~ q(x_t | x_0) by masking each non-anchored position i.i.d. with
// probability t/T; anchored positions come from templ when given
GraphTokens corrupt_graph(const GraphTokens& clean, const MaskSchedule& schedule,
                          int t, const nn::TransformerConfig& cfg, Rng& rng,
                          const GraphTemplate* templ = nullptr);

struct GraphLossWeights {
  double delta_class = 1.0;    // categories
  double delta_feature = 1.0;  // features and actions
  double delta_edge = 10.0;    // relations
};

// Cross-entropy on masked positions only, each attribute averaged over its
// masked positions within the scene, then combined with the block weights.
// Diagonal relation slots never contribute.
Tape::Id graph_loss(Tape& tape, const nn::DenoiserOutput& out,
                    const GraphTokens& clean, const GraphTokens& corrupted,
                    const nn::TransformerConfig& cfg, const GraphLossWeights& w);

struct GraphExample {
  GraphTokens clean;
  std::vector<double> lambda;  // empty = unconditional example
};

struct GraphTrainConfig {
  int steps = 3000;
  int batch_size = 32;
  double switch_frac = 0.75;  // class/feature terms drop to zero past this
  double delta_edge = 10.0;
  double cond_dropout = 0.2;  // probability of training a batch entry unconditioned
  nn::OptimConfig optim{};
  int log_every = 200;
};

// returns the final running mean loss; throws TrainingDivergedError on NaN
double train_graph_model(SceneTransformer& model,
                         const std::vector<GraphExample>& data,
                         const GraphTrainConfig& cfg, Rng& rng,
                         const std::function<void(int, double)>& progress = {});

// Ancestral sampler: start from all-masked (except anchors), reveal each
// masked position with probability 1/t per step, drawing from the predicted
// clean-class distribution (mask column excluded).  Afterwards directed
// edge pairs are reconciled: where edge(j,i) disagrees with the inverse of
// edge(i,j), the side revealed with higher confidence wins.
GraphTokens sample_graph(SceneTransformer& model, const GraphTemplate& templ,
                         const std::vector<double>& lambda, const MaskSchedule& schedule,
                         Rng& rng);

}  // namespace roomforge::diffusion
