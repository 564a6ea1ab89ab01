#include "roomforge/nn/transformer.hpp"

#include <string>

#include "roomforge/errors.hpp"

namespace roomforge::nn {

void TransformerConfig::validate() const {
  if (layers < 1) throw ConfigError("transformer needs at least one layer");
  if (width % heads != 0) throw ConfigError("width must be divisible by heads");
  if (lambda_dim % lambda_tokens != 0)
    throw ConfigError("lambda_dim must be divisible by lambda_tokens");
  if (categories < 1) throw ConfigError("transformer needs a category alphabet");
  if (features < 1 || actions < 1 || relations < 1)
    throw ConfigError("attribute alphabets must be non-empty");
  if (timesteps < 1) throw ConfigError("timesteps must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0,1)");
}

SceneTransformer::SceneTransformer(TransformerConfig cfg, Rng& rng)
    : cfg_(cfg) {
  cfg_.validate();
  const int W = cfg_.width;
  const int We = cfg_.edge_width;
  const int H = cfg_.heads;
  const int F = cfg_.ffn_mult * W;
  const double emb = 0.02;

  auto mat = [&](const std::string& name, int r, int c) {
    return store_.add(name, random_init(rng, r, c));
  };
  auto table = [&](const std::string& name, int r, int c) {
    return store_.add(name, random_init(rng, r, c, emb));
  };
  auto zeros = [&](const std::string& name, int r, int c) {
    return store_.add(name, Tensor::zeros(r, c));
  };
  auto ones = [&](const std::string& name, int c) {
    return store_.add(name, Tensor::filled(1, c, 1.0));
  };

  cat_emb_ = table("cat_emb", cfg_.categories + 1, W);
  feat_emb_ = table("feat_emb", cfg_.features + 1, W);
  act_emb_ = table("act_emb", cfg_.actions + 1, W);
  rel_emb_ = table("rel_emb", cfg_.relations + 1, We);
  step_emb_ = table("step_emb", cfg_.timesteps + 1, W);
  lam_proj_ = mat("lam_proj", cfg_.lambda_token_dim(), W);
  if (cfg_.layout_io) {
    layout_in_w_ = mat("layout_in_w", 8, W);
    layout_in_b_ = zeros("layout_in_b", 1, W);
  }

  layers_.reserve(cfg_.layers);
  for (int l = 0; l < cfg_.layers; ++l) {
    std::string p = "layer" + std::to_string(l) + ".";
    LayerIds L;
    L.ln1_g = ones(p + "ln1_g", W);
    L.ln1_b = zeros(p + "ln1_b", 1, W);
    L.wq = mat(p + "wq", W, W);
    L.wk = mat(p + "wk", W, W);
    L.wv = mat(p + "wv", W, W);
    L.wo = mat(p + "wo", W, W);
    L.bo = zeros(p + "bo", 1, W);
    L.edge_bias = mat(p + "edge_bias", We, H);
    L.edge_val = mat(p + "edge_val", We, W);
    L.ln2_g = ones(p + "ln2_g", W);
    L.ln2_b = zeros(p + "ln2_b", 1, W);
    L.cq = mat(p + "cq", W, W);
    L.ck = mat(p + "ck", W, W);
    L.cv = mat(p + "cv", W, W);
    L.co = mat(p + "co", W, W);
    L.bco = zeros(p + "bco", 1, W);
    L.eu_src = mat(p + "eu_src", W, We);
    L.eu_dst = mat(p + "eu_dst", W, We);
    L.eu_self = mat(p + "eu_self", We, We);
    L.eu_bias = zeros(p + "eu_bias", 1, We);
    L.lne_g = ones(p + "lne_g", We);
    L.lne_b = zeros(p + "lne_b", 1, We);
    L.ln3_g = ones(p + "ln3_g", W);
    L.ln3_b = zeros(p + "ln3_b", 1, W);
    L.w1 = mat(p + "w1", W, F);
    L.b1 = zeros(p + "b1", 1, F);
    L.w2 = mat(p + "w2", F, W);
    L.b2 = zeros(p + "b2", 1, W);
    layers_.push_back(L);
  }

  lnf_g_ = ones("lnf_g", W);
  lnf_b_ = zeros("lnf_b", 1, W);
  lnfe_g_ = ones("lnfe_g", We);
  lnfe_b_ = zeros("lnfe_b", 1, We);
  head_cat_ = mat("head_cat", W, cfg_.categories + 1);
  head_cat_b_ = zeros("head_cat_b", 1, cfg_.categories + 1);
  head_feat_ = mat("head_feat", W, cfg_.features + 1);
  head_feat_b_ = zeros("head_feat_b", 1, cfg_.features + 1);
  head_act_ = mat("head_act", W, cfg_.actions + 1);
  head_act_b_ = zeros("head_act_b", 1, cfg_.actions + 1);
  head_rel_ = mat("head_rel", We, cfg_.relations + 1);
  head_rel_b_ = zeros("head_rel_b", 1, cfg_.relations + 1);
  if (cfg_.layout_io) {
    head_layout_ = mat("head_layout", W, 8);
    head_layout_b_ = zeros("head_layout_b", 1, 8);
  }
}

DenoiserOutput SceneTransformer::forward(Tape& t, const GraphTokens& tok,
                                         const std::vector<double>& lambda,
                                         int timestep,
                                         const Tensor* noisy_layout) const {
  const int n = tok.n;
  if (n < 1) throw Error("forward needs at least one node");
  if (static_cast<int>(tok.categories.size()) != n ||
      static_cast<int>(tok.features.size()) != n ||
      static_cast<int>(tok.actions.size()) != n ||
      static_cast<int>(tok.relations.size()) != n * n)
    throw Error("token arrays do not match node count");
  if (timestep < 0 || timestep > cfg_.timesteps)
    throw Error("timestep outside the trained horizon");
  if (cfg_.layout_io && noisy_layout == nullptr)
    throw Error("this model expects a noisy layout input");
  if (!lambda.empty() && static_cast<int>(lambda.size()) != cfg_.lambda_dim)
    throw Error("condition vector has the wrong length");

  const int H = cfg_.heads;
  const int dh = cfg_.head_dim();
  const double att = 1.0 / std::sqrt(static_cast<double>(dh));

  // node channels: summed attribute embeddings (+ layout, + step)
  auto x = t.add(t.add(t.gather_rows(t.param(cat_emb_), tok.categories),
                       t.gather_rows(t.param(feat_emb_), tok.features)),
                 t.gather_rows(t.param(act_emb_), tok.actions));
  if (cfg_.layout_io) {
    if (noisy_layout->rows != n || noisy_layout->cols != 8)
      throw Error("noisy layout must be n x 8");
    auto lay = t.add_rowvec(t.matmul(t.input(*noisy_layout), t.param(layout_in_w_)),
                            t.param(layout_in_b_));
    x = t.add(x, lay);
  }
  x = t.add_rowvec(x, t.gather_rows(t.param(step_emb_), {timestep}));

  // edge channels
  auto e = t.gather_rows(t.param(rel_emb_), tok.relations);

  // condition folded into tokens once; zero lambda = unconditional
  Tensor lam(cfg_.lambda_tokens, cfg_.lambda_token_dim());
  if (!lambda.empty()) lam.v.assign(lambda.begin(), lambda.end());
  auto lam_tokens = t.matmul(t.input(std::move(lam)), t.param(lam_proj_));

  std::vector<int> src_rows(static_cast<size_t>(n) * n);
  std::vector<int> dst_rows(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      src_rows[static_cast<size_t>(i) * n + j] = i;
      dst_rows[static_cast<size_t>(i) * n + j] = j;
    }

  auto attention = [&](Tape::Id q_in, Tape::Id kv_in, Tape::Id wq, Tape::Id wk,
                       Tape::Id wv, Tape::Id bias_cols, Tape::Id pair_vals) {
    auto Q = t.matmul(q_in, wq);
    auto K = t.matmul(kv_in, wk);
    auto V = t.matmul(kv_in, wv);
    std::vector<Tape::Id> heads;
    heads.reserve(H);
    for (int h = 0; h < H; ++h) {
      auto Qh = t.slice_cols(Q, h * dh, dh);
      auto Kh = t.slice_cols(K, h * dh, dh);
      auto Vh = t.slice_cols(V, h * dh, dh);
      auto scores = t.scale(t.matmul(Qh, t.transpose(Kh)), att);
      if (bias_cols >= 0) {
        auto bias = t.reshape(t.slice_cols(bias_cols, h, 1), n, n);
        scores = t.add(scores, bias);
      }
      auto weights = t.softmax_rows(scores);
      auto head = t.matmul(weights, Vh);
      // pair-dependent values let a node read its own edge labels even when
      // every per-node value is identical
      if (pair_vals >= 0)
        head = t.add(head, t.pair_attend(weights, t.slice_cols(pair_vals, h * dh, dh)));
      heads.push_back(head);
    }
    return t.concat_cols(heads);
  };

  for (const auto& L : layers_) {
    // self-attention over nodes, scores biased by the pair channels
    {
      auto xn = t.layer_norm(x, t.param(L.ln1_g), t.param(L.ln1_b));
      auto bias_cols = t.matmul(e, t.param(L.edge_bias));  // [n*n, H]
      auto pair_vals = t.matmul(e, t.param(L.edge_val));   // [n*n, W]
      auto o = attention(xn, xn, t.param(L.wq), t.param(L.wk), t.param(L.wv),
                         bias_cols, pair_vals);
      o = t.add_rowvec(t.matmul(o, t.param(L.wo)), t.param(L.bo));
      x = t.add(x, t.dropout(o, cfg_.dropout));
    }
    // cross-attention into the condition tokens
    {
      auto xn = t.layer_norm(x, t.param(L.ln2_g), t.param(L.ln2_b));
      auto o = attention(xn, lam_tokens, t.param(L.cq), t.param(L.ck), t.param(L.cv),
                         -1, -1);
      o = t.add_rowvec(t.matmul(o, t.param(L.co)), t.param(L.bco));
      x = t.add(x, t.dropout(o, cfg_.dropout));
    }
    // edge refresh from endpoint nodes
    {
      auto from_src = t.gather_rows(t.matmul(x, t.param(L.eu_src)), src_rows);
      auto from_dst = t.gather_rows(t.matmul(x, t.param(L.eu_dst)), dst_rows);
      auto from_self = t.matmul(e, t.param(L.eu_self));
      auto mix = t.add_rowvec(t.add(t.add(from_src, from_dst), from_self),
                              t.param(L.eu_bias));
      e = t.layer_norm(t.add(e, t.gelu(mix)), t.param(L.lne_g), t.param(L.lne_b));
    }
    // feed-forward
    {
      auto xn = t.layer_norm(x, t.param(L.ln3_g), t.param(L.ln3_b));
      auto h1 = t.gelu(t.add_rowvec(t.matmul(xn, t.param(L.w1)), t.param(L.b1)));
      auto h2 = t.add_rowvec(t.matmul(h1, t.param(L.w2)), t.param(L.b2));
      x = t.add(x, t.dropout(h2, cfg_.dropout));
    }
  }

  auto xf = t.layer_norm(x, t.param(lnf_g_), t.param(lnf_b_));
  auto ef = t.layer_norm(e, t.param(lnfe_g_), t.param(lnfe_b_));

  DenoiserOutput out;
  out.cat_logits =
      t.add_rowvec(t.matmul(xf, t.param(head_cat_)), t.param(head_cat_b_));
  out.feat_logits =
      t.add_rowvec(t.matmul(xf, t.param(head_feat_)), t.param(head_feat_b_));
  out.act_logits =
      t.add_rowvec(t.matmul(xf, t.param(head_act_)), t.param(head_act_b_));
  out.rel_logits =
      t.add_rowvec(t.matmul(ef, t.param(head_rel_)), t.param(head_rel_b_));
  if (cfg_.layout_io)
    out.layout =
        t.add_rowvec(t.matmul(xf, t.param(head_layout_)), t.param(head_layout_b_));
  return out;
}

}  // namespace roomforge::nn
