#pragma once

#include <vector>

#include "roomforge/nn/tape.hpp"

namespace roomforge::nn {

struct TransformerConfig {
  int layers = 2;
  int heads = 4;
  int width = 64;       // node channels; must divide by heads
  int edge_width = 32;  // edge channels
  int ffn_mult = 4;
  double dropout = 0.0;
  int timesteps = 100;  // diffusion horizon T; step embeddings cover 0..T
  int categories = 0;   // class counts WITHOUT the mask token
  int features = 64;
  int actions = 4;
  int relations = 11;
  int lambda_dim = 512;   // prompt embedding length
  int lambda_tokens = 8;  // lambda is folded into this many tokens
  bool layout_io = false; // adds the noisy-layout input and layout head

  [[nodiscard]] int head_dim() const { return width / heads; }
  [[nodiscard]] int lambda_token_dim() const { return lambda_dim / lambda_tokens; }
  void validate() const;
};

// one scene's tokenized graph; the mask token is the last index of each
// attribute alphabet (categories for cats, etc.)
struct GraphTokens {
  int n = 0;
  std::vector<int> categories;  // n entries in [0, C]
  std::vector<int> features;    // n entries in [0, F]
  std::vector<int> actions;     // n entries in [0, A]
  std::vector<int> relations;   // n*n row-major entries in [0, R]
};

struct DenoiserOutput {
  Tape::Id cat_logits = -1;   // [n, C+1]
  Tape::Id feat_logits = -1;  // [n, F+1]
  Tape::Id act_logits = -1;   // [n, A+1]
  Tape::Id rel_logits = -1;   // [n*n, R+1]
  Tape::Id layout = -1;       // [n, 8] when layout_io is on
};

// Permutation-equivariant graph transformer with dense pairwise edge
// channels.  Node updates attend over nodes (biased by edge features) and
// over the folded condition vector; edge channels are refreshed from their
// endpoints each layer.  No positional encoding: identity lives in the
// attributes and edges alone.
class SceneTransformer {
 public:
  SceneTransformer(TransformerConfig cfg, Rng& init_rng);

  [[nodiscard]] const TransformerConfig& config() const { return cfg_; }
  ParamStore& params() { return store_; }
  [[nodiscard]] const ParamStore& params() const { return store_; }

  // lambda may be empty (unconditional); noisy_layout required iff layout_io
  DenoiserOutput forward(Tape& tape, const GraphTokens& tokens,
                         const std::vector<double>& lambda, int timestep,
                         const Tensor* noisy_layout = nullptr) const;

 private:
  struct LayerIds {
    int ln1_g, ln1_b, wq, wk, wv, wo, bo, edge_bias, edge_val;
    int ln2_g, ln2_b, cq, ck, cv, co, bco;
    int eu_src, eu_dst, eu_self, eu_bias, lne_g, lne_b;
    int ln3_g, ln3_b, w1, b1, w2, b2;
  };

  TransformerConfig cfg_;
  ParamStore store_;

  int cat_emb_, feat_emb_, act_emb_, rel_emb_, step_emb_, lam_proj_;
  int layout_in_w_ = -1, layout_in_b_ = -1;
  std::vector<LayerIds> layers_;
  int lnf_g_, lnf_b_, lnfe_g_, lnfe_b_;
  int head_cat_, head_cat_b_, head_feat_, head_feat_b_;
  int head_act_, head_act_b_, head_rel_, head_rel_b_;
  int head_layout_ = -1, head_layout_b_ = -1;
};

}  // namespace roomforge::nn
