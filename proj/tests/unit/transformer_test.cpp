#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "roomforge/errors.hpp"
#include "roomforge/nn/checkpoint.hpp"
#include "roomforge/nn/train.hpp"
#include "roomforge/nn/transformer.hpp"
#include "roomforge/rng.hpp"

using namespace roomforge;
using namespace roomforge::nn;

namespace {

TransformerConfig mini_config(bool layout_io = false) {
  TransformerConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.width = 16;
  cfg.edge_width = 8;
  cfg.ffn_mult = 2;
  cfg.timesteps = 10;
  cfg.categories = 5;
  cfg.features = 6;
  cfg.actions = 4;
  cfg.relations = 11;
  cfg.lambda_dim = 32;
  cfg.lambda_tokens = 4;
  cfg.layout_io = layout_io;
  return cfg;
}

GraphTokens random_tokens(Rng& rng, const TransformerConfig& cfg, int n) {
  GraphTokens tok;
  tok.n = n;
  for (int i = 0; i < n; ++i) {
    tok.categories.push_back(static_cast<int>(rng.index(cfg.categories + 1)));
    tok.features.push_back(static_cast<int>(rng.index(cfg.features + 1)));
    tok.actions.push_back(static_cast<int>(rng.index(cfg.actions + 1)));
  }
  for (int i = 0; i < n * n; ++i)
    tok.relations.push_back(static_cast<int>(rng.index(cfg.relations + 1)));
  return tok;
}

std::vector<double> random_lambda(Rng& rng, int dim) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("node and edge outputs follow input permutations") {
  auto cfg = mini_config();
  Rng init(42);
  SceneTransformer model(cfg, init);

  Rng rng(7);
  const int n = 5;
  GraphTokens tok = random_tokens(rng, cfg, n);
  auto lambda = random_lambda(rng, cfg.lambda_dim);

  // new slot i holds old node perm[i]
  std::vector<int> perm{3, 0, 4, 1, 2};
  GraphTokens ptok;
  ptok.n = n;
  for (int i = 0; i < n; ++i) {
    ptok.categories.push_back(tok.categories[perm[i]]);
    ptok.features.push_back(tok.features[perm[i]]);
    ptok.actions.push_back(tok.actions[perm[i]]);
  }
  ptok.relations.resize(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ptok.relations[static_cast<size_t>(i) * n + j] =
          tok.relations[static_cast<size_t>(perm[i]) * n + perm[j]];

  Tape t1(&model.params());
  auto out1 = model.forward(t1, tok, lambda, 3);
  Tape t2(&model.params());
  auto out2 = model.forward(t2, ptok, lambda, 3);

  const Tensor& c1 = t1.val(out1.cat_logits);
  const Tensor& c2 = t2.val(out2.cat_logits);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < c1.cols; ++j)
      CHECK(c2.at(i, j) == doctest::Approx(c1.at(perm[i], j)).epsilon(1e-9));

  const Tensor& r1 = t1.val(out1.rel_logits);
  const Tensor& r2 = t2.val(out2.rel_logits);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < r1.cols; ++k)
        CHECK(r2.at(i * n + j, k) ==
              doctest::Approx(r1.at(perm[i] * n + perm[j], k)).epsilon(1e-9));
}

TEST_CASE("condition, edges, and timestep all reach the outputs") {
  auto cfg = mini_config();
  Rng init(43);
  SceneTransformer model(cfg, init);
  Rng rng(8);
  GraphTokens tok = random_tokens(rng, cfg, 4);
  auto lam_a = random_lambda(rng, cfg.lambda_dim);
  auto lam_b = random_lambda(rng, cfg.lambda_dim);

  auto logits = [&](const std::vector<double>& lam, int step,
                    const GraphTokens& tk) {
    Tape t(&model.params());
    auto out = model.forward(t, tk, lam, step);
    return t.val(out.cat_logits);
  };

  Tensor base = logits(lam_a, 3, tok);
  CHECK(logits(lam_b, 3, tok).v != base.v);       // condition wired in
  CHECK(logits({}, 3, tok).v != base.v);          // unconditional differs too
  CHECK(logits(lam_a, 7, tok).v != base.v);       // timestep wired in

  GraphTokens tok2 = tok;
  tok2.relations[1] = (tok2.relations[1] + 1) % (cfg.relations + 1);
  CHECK(logits(lam_a, 3, tok2).v != base.v);      // edge tokens reach nodes
}

TEST_CASE("graph-mode gradients survive a finite-difference audit") {
  auto cfg = mini_config();
  Rng init(44);
  SceneTransformer model(cfg, init);
  Rng rng(9);
  const int n = 3;
  GraphTokens tok = random_tokens(rng, cfg, n);
  auto lambda = random_lambda(rng, cfg.lambda_dim);

  std::vector<int> cat_t{1, 4, 0};
  std::vector<int> feat_t{2, 2, 5};
  std::vector<int> act_t{0, 3, 1};
  std::vector<int> rel_t(static_cast<size_t>(n) * n);
  std::vector<double> node_w{1.0 / 3, 1.0 / 3, 0.0};
  std::vector<double> rel_w(static_cast<size_t>(n) * n, 0.0);
  for (size_t k = 0; k < rel_t.size(); ++k) rel_t[k] = static_cast<int>(k % 11);
  rel_w[1] = 0.5;
  rel_w[5] = 0.5;

  auto build = [&](Tape& t) {
    auto out = model.forward(t, tok, lambda, 4);
    auto lc = t.cross_entropy(out.cat_logits, cat_t, node_w);
    auto lf = t.cross_entropy(out.feat_logits, feat_t, node_w);
    auto la = t.cross_entropy(out.act_logits, act_t, node_w);
    auto lr = t.cross_entropy(out.rel_logits, rel_t, rel_w);
    return t.add(t.add(lc, lf), t.add_scaled(la, lr, 10.0));
  };

  auto report = gradient_check(model.params(), build, 2);
  CAPTURE(report.worst_param);
  CHECK(report.checked > 100);
  CHECK(report.max_rel_err < 1e-3);  // double-precision runs land far below
  CHECK(report.max_rel_err < 1e-5);
}

TEST_CASE("layout-mode gradients survive a finite-difference audit") {
  auto cfg = mini_config(true);
  Rng init(45);
  SceneTransformer model(cfg, init);
  Rng rng(10);
  const int n = 3;
  GraphTokens tok = random_tokens(rng, cfg, n);
  auto lambda = random_lambda(rng, cfg.lambda_dim);
  Tensor noisy(n, 8);
  for (double& x : noisy.v) x = rng.normal();
  Tensor target(n, 8);
  for (double& x : target.v) x = rng.normal();
  std::vector<double> w(n, 1.0 / n);

  auto build = [&](Tape& t) {
    auto out = model.forward(t, tok, lambda, 2, &noisy);
    return t.mse(out.layout, target, w);
  };

  auto report = gradient_check(model.params(), build, 2);
  CAPTURE(report.worst_param);
  CHECK(report.max_rel_err < 1e-3);
  CHECK(report.max_rel_err < 1e-5);
}

TEST_CASE("a tiny model overfits a fixed graph") {
  auto cfg = mini_config();
  cfg.layers = 1;
  Rng init(46);
  SceneTransformer model(cfg, init);
  AdamW opt({.lr = 3e-3});

  GraphTokens masked;
  masked.n = 2;
  masked.categories = {cfg.categories, cfg.categories};  // both masked
  masked.features = {cfg.features, cfg.features};
  masked.actions = {cfg.actions, cfg.actions};
  // asymmetric visible relations break the node symmetry; with identical
  // tokens everywhere the equivariant network could never tell them apart
  masked.relations = {10, 3, 5, 10};
  std::vector<int> cat_t{1, 3};
  std::vector<double> w{0.5, 0.5};

  double first = 0.0, last = 0.0;
  for (int step = 0; step < 200; ++step) {
    Tape t(&model.params());
    auto out = model.forward(t, masked, {}, 5);
    auto loss = t.cross_entropy(out.cat_logits, cat_t, w);
    if (step == 0) first = t.val(loss).v[0];
    last = t.val(loss).v[0];
    t.backward(loss);
    opt.step(model.params());
  }
  CHECK(first > 1.0);  // roughly ln(6) at init
  CHECK(last < 0.05);
  CHECK(opt.iterations() == 200);
}

TEST_CASE("ema weights trail the live weights and the guard swaps them") {
  ParamStore store;
  Rng rng(47);
  int p = store.add("w", random_init(rng, 2, 2));
  AdamW opt({.lr = 0.1, .ema_decay = 0.5});
  Tensor before = store[p].value;

  Tensor target = Tensor::filled(2, 2, 3.0);
  for (int i = 0; i < 20; ++i) {
    Tape t(&store);
    auto loss = t.mse(t.param(p), target, {1.0, 1.0});
    t.backward(loss);
    opt.step(store);
  }
  // live weights approach the target, the average lags behind
  for (size_t k = 0; k < store[p].value.v.size(); ++k) {
    double live = store[p].value.v[k];
    double ema = store[p].ema.v[k];
    CHECK(std::abs(live - 3.0) < std::abs(before.v[k] - 3.0));
    CHECK(ema != live);
  }

  Tensor live_copy = store[p].value;
  Tensor ema_copy = store[p].ema;
  {
    EmaGuard guard(store);
    CHECK(store[p].value.v == ema_copy.v);
    CHECK(store[p].ema.v == live_copy.v);
  }
  CHECK(store[p].value.v == live_copy.v);
  CHECK(store[p].ema.v == ema_copy.v);
}

TEST_CASE("checkpoints round-trip bitwise and validate their header") {
  namespace fs = std::filesystem;
  auto cfg = mini_config(true);
  Rng init(48);
  SceneTransformer model(cfg, init);

  CheckpointMeta meta;
  meta.kind = "layout_denoiser";
  meta.config = cfg;
  meta.extra_json = "{\"norm\":{\"t_mean\":[0.1,0.2,0.3]},\"steps\":123}";

  fs::path a = fs::temp_directory_path() / "roomforge_ckpt_a.bin";
  fs::path b = fs::temp_directory_path() / "roomforge_ckpt_b.bin";
  save_checkpoint(a, meta, model.params());

  auto peek = read_checkpoint_meta(a);
  CHECK(peek.kind == "layout_denoiser");
  CHECK(peek.config.width == cfg.width);
  CHECK(peek.config.layout_io);
  CHECK(peek.extra_json.find("t_mean") != std::string::npos);

  Rng other(999);
  SceneTransformer restored(peek.config, other);
  auto loaded = load_checkpoint(a, restored.params());
  CHECK(loaded.kind == meta.kind);
  save_checkpoint(b, loaded, restored.params());

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).substr(0, 4) == "RFCK");

  // identical outputs from the restored weights
  Rng rng(11);
  GraphTokens tok = random_tokens(rng, cfg, 3);
  Tensor noisy(3, 8);
  for (double& x : noisy.v) x = rng.normal();
  Tape t1(&model.params());
  Tape t2(&restored.params());
  // quantized to f32 on save, so compare restored vs restored-of-restored
  SceneTransformer again(peek.config, other);
  load_checkpoint(b, again.params());
  Tape t3(&again.params());
  auto o2 = restored.forward(t2, tok, {}, 1, &noisy);
  auto o3 = again.forward(t3, tok, {}, 1, &noisy);
  CHECK(t2.val(o2.layout).v == t3.val(o3.layout).v);

  // header validation
  std::ofstream bad(a, std::ios::binary);
  bad << "NOPE";
  bad.close();
  ParamStore dummy;
  CHECK_THROWS_AS(read_checkpoint_meta(a), FileFormatError);
  CHECK_THROWS_AS(load_checkpoint(a, dummy), FileFormatError);

  fs::remove(a);
  fs::remove(b);
}

TEST_CASE("config validation rejects inconsistent shapes") {
  Rng rng(49);
  auto cfg = mini_config();
  cfg.width = 15;  // not divisible by heads
  CHECK_THROWS_AS(SceneTransformer(cfg, rng), ConfigError);
  cfg = mini_config();
  cfg.lambda_dim = 33;
  CHECK_THROWS_AS(SceneTransformer(cfg, rng), ConfigError);
  cfg = mini_config();
  cfg.categories = 0;
  CHECK_THROWS_AS(SceneTransformer(cfg, rng), ConfigError);

  // runtime shape guards
  cfg = mini_config();
  SceneTransformer model(cfg, rng);
  Rng r2(50);
  GraphTokens tok = random_tokens(r2, cfg, 3);
  Tape t(&model.params());
  CHECK_THROWS_AS(model.forward(t, tok, {}, cfg.timesteps + 1), Error);
  GraphTokens bad_tok = tok;
  bad_tok.relations.pop_back();
  CHECK_THROWS_AS(model.forward(t, bad_tok, {}, 1), Error);
  std::vector<double> short_lambda(7, 0.0);
  CHECK_THROWS_AS(model.forward(t, tok, short_lambda, 1), Error);
}
