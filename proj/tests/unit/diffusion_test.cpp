#include <doctest.h>

#include <cmath>
#include <vector>

#include "roomforge/diffusion/continuous.hpp"
#include "roomforge/diffusion/discrete.hpp"
#include "roomforge/errors.hpp"
#include "roomforge/rng.hpp"
#include "roomforge/types.hpp"

using namespace roomforge;
using namespace roomforge::diffusion;
using nn::GraphTokens;
using nn::Tape;
using nn::Tensor;
using nn::TransformerConfig;

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

GraphTokens clean_tokens(Rng& rng, const TransformerConfig& cfg, int n) {
  GraphTokens tok;
  tok.n = n;
  for (int i = 0; i < n; ++i) {
    tok.categories.push_back(static_cast<int>(rng.index(cfg.categories)));
    tok.features.push_back(static_cast<int>(rng.index(cfg.features)));
    tok.actions.push_back(static_cast<int>(rng.index(cfg.actions)));
  }
  const int none = static_cast<int>(RelationPredicate::None);
  tok.relations.assign(static_cast<size_t>(n) * n, none);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto p = static_cast<RelationPredicate>(rng.index(cfg.relations));
      tok.relations[static_cast<size_t>(i) * n + j] = static_cast<int>(p);
      tok.relations[static_cast<size_t>(j) * n + i] =
          static_cast<int>(inverse_predicate(p));
    }
  return tok;
}

std::vector<double> random_lambda(Rng& rng, int dim) {
  std::vector<double> v(static_cast<size_t>(dim));
  for (double& x : v) x = rng.normal();
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// masking schedule

TEST_CASE("stepwise mask probabilities telescope to a linear marginal") {
  MaskSchedule s;  // T = 100
  for (int t = 1; t <= s.T; ++t) {
    double survive = 1.0;
    for (int u = 1; u <= t; ++u) survive *= 1.0 - s.step_mask_prob(u);
    CHECK(std::abs(survive - static_cast<double>(s.T - t) / s.T) < 1e-12);
    CHECK(s.masked_marginal(t) == doctest::Approx(static_cast<double>(t) / s.T));
    CHECK(s.reveal_prob(t) == doctest::Approx(1.0 / t));
  }
  CHECK(s.step_mask_prob(s.T) == doctest::Approx(1.0));  // final step absorbs all
}

TEST_CASE("graph corruption masks at the marginal rate") {
  auto cfg = mini_config();
  MaskSchedule schedule{cfg.timesteps};
  Rng rng(7);
  auto clean = clean_tokens(rng, cfg, 6);
  const int t = 3;  // marginal 0.3
  const double p = schedule.masked_marginal(t);

  int node_masked = 0, node_total = 0;
  int rel_masked = 0, rel_total = 0;
  const int trials = 600;
  for (int trial = 0; trial < trials; ++trial) {
    auto noisy = corrupt_graph(clean, schedule, t, cfg, rng);
    for (int i = 0; i < clean.n; ++i) {
      auto tally = [&](int got, int was, int mask_token) {
        ++node_total;
        if (got == mask_token)
          ++node_masked;
        else
          CHECK(got == was);  // survivors pass through unchanged
      };
      tally(noisy.categories[i], clean.categories[i], cfg.categories);
      tally(noisy.features[i], clean.features[i], cfg.features);
      tally(noisy.actions[i], clean.actions[i], cfg.actions);
    }
    for (int i = 0; i < clean.n; ++i)
      for (int j = 0; j < clean.n; ++j) {
        size_t k = static_cast<size_t>(i) * clean.n + j;
        if (i == j) {
          CHECK(noisy.relations[k] == clean.relations[k]);  // never noised
          continue;
        }
        ++rel_total;
        if (noisy.relations[k] == cfg.relations)
          ++rel_masked;
        else
          CHECK(noisy.relations[k] == clean.relations[k]);
      }
  }
  auto within = [&](int masked, int total) {
    double frac = static_cast<double>(masked) / total;
    double sigma = std::sqrt(p * (1.0 - p) / total);
    return std::abs(frac - p) < 5.0 * sigma;
  };
  CHECK(within(node_masked, node_total));
  CHECK(within(rel_masked, rel_total));

  // the final step absorbs every free position
  auto saturated = corrupt_graph(clean, schedule, schedule.T, cfg, rng);
  for (int i = 0; i < clean.n; ++i) {
    CHECK(saturated.categories[i] == cfg.categories);
    CHECK(saturated.features[i] == cfg.features);
    CHECK(saturated.actions[i] == cfg.actions);
    for (int j = 0; j < clean.n; ++j)
      if (i != j)
        CHECK(saturated.relations[static_cast<size_t>(i) * clean.n + j] ==
              cfg.relations);
  }

  CHECK_THROWS_AS(corrupt_graph(clean, schedule, 0, cfg, rng), Error);
  CHECK_THROWS_AS(corrupt_graph(clean, schedule, schedule.T + 1, cfg, rng), Error);
}

TEST_CASE("anchored template slots survive corruption untouched") {
  auto cfg = mini_config();
  MaskSchedule schedule{cfg.timesteps};
  Rng rng(11);
  auto clean = clean_tokens(rng, cfg, 4);
  auto templ = GraphTemplate::free_graph(4);
  templ.categories[0] = clean.categories[0];
  templ.actions[2] = clean.actions[2];
  templ.relations[0 * 4 + 1] = clean.relations[0 * 4 + 1];

  for (int trial = 0; trial < 200; ++trial) {
    auto noisy = corrupt_graph(clean, schedule, schedule.T, cfg, rng, &templ);
    CHECK(noisy.categories[0] == clean.categories[0]);
    CHECK(noisy.actions[2] == clean.actions[2]);
    CHECK(noisy.relations[0 * 4 + 1] == clean.relations[0 * 4 + 1]);
    // everything unanchored is gone at the horizon
    CHECK(noisy.categories[1] == cfg.categories);
    CHECK(noisy.relations[1 * 4 + 0] == cfg.relations);
  }
}

// ---------------------------------------------------------------------------
// graph loss

namespace {

// denoiser output backed by plain inputs; logits are caller-provided
nn::DenoiserOutput logits_output(Tape& tape, int n, const TransformerConfig& cfg,
                                 const Tensor* cat_override = nullptr) {
  nn::DenoiserOutput out;
  Tensor cat = cat_override ? *cat_override : Tensor::zeros(n, cfg.categories + 1);
  out.cat_logits = tape.input(cat);
  out.feat_logits = tape.input(Tensor::zeros(n, cfg.features + 1));
  out.act_logits = tape.input(Tensor::zeros(n, cfg.actions + 1));
  out.rel_logits = tape.input(Tensor::zeros(n * n, cfg.relations + 1));
  return out;
}

}  // namespace

TEST_CASE("graph loss on flat logits equals the log alphabet sizes") {
  TransformerConfig cfg = mini_config();
  cfg.categories = 21;
  cfg.features = 64;
  cfg.actions = 4;
  cfg.relations = 11;
  const int n = 2;

  GraphTokens clean;
  clean.n = n;
  clean.categories = {3, 7};
  clean.features = {10, 20};
  clean.actions = {0, 2};
  const int none = static_cast<int>(RelationPredicate::None);
  clean.relations = {none, 0, 1, none};

  GraphTokens corrupted = clean;  // mask everything maskable
  corrupted.categories = {cfg.categories, cfg.categories};
  corrupted.features = {cfg.features, cfg.features};
  corrupted.actions = {cfg.actions, cfg.actions};
  corrupted.relations = {none, cfg.relations, cfg.relations, none};

  nn::ParamStore store;
  Tape tape(&store);
  auto out = logits_output(tape, n, cfg);

  SUBCASE("all blocks at full weight") {
    GraphLossWeights w;  // 1, 1, 10
    auto loss = graph_loss(tape, out, clean, corrupted, cfg, w);
    double expected = std::log(22.0) + (std::log(65.0) + std::log(5.0)) +
                      10.0 * std::log(12.0);
    CHECK(tape.val(loss).v[0] == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("category block alone") {
    GraphLossWeights w{1.0, 0.0, 0.0};
    auto loss = graph_loss(tape, out, clean, corrupted, cfg, w);
    CHECK(tape.val(loss).v[0] == doctest::Approx(std::log(22.0)).epsilon(1e-12));
  }
  SUBCASE("edge block alone, as after the weight switch") {
    GraphLossWeights w{0.0, 0.0, 10.0};
    auto loss = graph_loss(tape, out, clean, corrupted, cfg, w);
    CHECK(tape.val(loss).v[0] ==
          doctest::Approx(10.0 * std::log(12.0)).epsilon(1e-12));
  }
}

TEST_CASE("graph loss averages over masked positions only") {
  TransformerConfig cfg = mini_config();
  cfg.categories = 21;
  const int n = 2;

  GraphTokens clean;
  clean.n = n;
  clean.categories = {3, 7};
  clean.features = {1, 2};
  clean.actions = {0, 2};
  const int none = static_cast<int>(RelationPredicate::None);
  clean.relations = {none, 0, 1, none};

  // row 0 puts extra logit mass on the true class; row 1 stays flat
  Tensor cat = Tensor::zeros(n, cfg.categories + 1);
  cat.at(0, 3) = std::log(3.0);  // softmax -> 3 / 24, so nll = ln 8
  nn::ParamStore store;

  SUBCASE("both category slots masked") {
    GraphTokens corrupted = clean;
    corrupted.categories = {cfg.categories, cfg.categories};
    Tape tape(&store);
    auto out = logits_output(tape, n, cfg, &cat);
    auto loss = graph_loss(tape, out, clean, corrupted, cfg, {1.0, 0.0, 0.0});
    double expected = 0.5 * (std::log(8.0) + std::log(22.0));
    CHECK(tape.val(loss).v[0] == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("only the confident slot masked") {
    GraphTokens corrupted = clean;
    corrupted.categories[0] = cfg.categories;
    Tape tape(&store);
    auto out = logits_output(tape, n, cfg, &cat);
    auto loss = graph_loss(tape, out, clean, corrupted, cfg, {1.0, 0.0, 0.0});
    CHECK(tape.val(loss).v[0] == doctest::Approx(std::log(8.0)).epsilon(1e-12));
  }
  SUBCASE("nothing masked means zero loss") {
    Tape tape(&store);
    auto out = logits_output(tape, n, cfg, &cat);
    auto loss = graph_loss(tape, out, clean, clean, cfg, {1.0, 1.0, 10.0});
    CHECK(tape.val(loss).v[0] == doctest::Approx(0.0));
  }
}

// ---------------------------------------------------------------------------
// graph training and sampling

TEST_CASE("graph training drives the loss down on a tiny corpus") {
  auto cfg = mini_config();
  Rng init(21);
  nn::SceneTransformer model(cfg, init);

  Rng data_rng(5);
  std::vector<GraphExample> data;
  for (int k = 0; k < 2; ++k) {
    GraphExample ex;
    ex.clean = clean_tokens(data_rng, cfg, 3);
    ex.lambda = random_lambda(data_rng, cfg.lambda_dim);
    data.push_back(std::move(ex));
  }

  GraphTrainConfig tc;
  tc.steps = 60;
  tc.batch_size = 2;
  tc.switch_frac = 1.0;  // keep every block active for the whole run
  tc.cond_dropout = 0.2;
  tc.optim.lr = 3e-3;
  tc.log_every = 1000;

  double first = 0.0, last = 0.0;
  bool have_first = false;
  Rng rng(99);
  last = train_graph_model(model, data, tc, rng, [&](int, double running) {
    if (!have_first) {
      first = running;
      have_first = true;
    }
  });
  CHECK(have_first);
  CHECK(std::isfinite(last));
  CHECK(last < first);

  CHECK_THROWS_AS(train_graph_model(model, {}, tc, rng), InsufficientDataError);
}

TEST_CASE("graph sampling fills every slot and respects anchors") {
  auto cfg = mini_config();
  Rng init(31);
  nn::SceneTransformer model(cfg, init);
  MaskSchedule schedule{cfg.timesteps};
  const int n = 4;
  const int none = static_cast<int>(RelationPredicate::None);

  auto templ = GraphTemplate::free_graph(n);
  templ.categories[0] = 2;
  templ.features[1] = 3;
  templ.actions[2] = 1;
  templ.relations[0 * n + 1] = static_cast<int>(RelationPredicate::LeftOf);

  Rng rng(77);
  auto tok = sample_graph(model, templ, {}, schedule, rng);

  for (int i = 0; i < n; ++i) {
    CHECK(tok.categories[i] >= 0);
    CHECK(tok.categories[i] < cfg.categories);
    CHECK(tok.features[i] < cfg.features);
    CHECK(tok.actions[i] < cfg.actions);
    CHECK(tok.relations[static_cast<size_t>(i) * n + i] == none);
    for (int j = 0; j < n; ++j)
      CHECK(tok.relations[static_cast<size_t>(i) * n + j] < cfg.relations);
  }
  CHECK(tok.categories[0] == 2);
  CHECK(tok.features[1] == 3);
  CHECK(tok.actions[2] == 1);
  CHECK(tok.relations[0 * n + 1] == static_cast<int>(RelationPredicate::LeftOf));
  CHECK(tok.relations[1 * n + 0] == static_cast<int>(RelationPredicate::RightOf));

  // every directed pair ends up inverse-consistent
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto p = static_cast<RelationPredicate>(tok.relations[static_cast<size_t>(i) * n + j]);
      auto q = static_cast<RelationPredicate>(tok.relations[static_cast<size_t>(j) * n + i]);
      CHECK(q == inverse_predicate(p));
    }

  // same seed reproduces the draw, a different seed moves it
  Rng rng_a(77), rng_b(78);
  auto again = sample_graph(model, templ, {}, schedule, rng_a);
  CHECK(again.categories == tok.categories);
  CHECK(again.features == tok.features);
  CHECK(again.actions == tok.actions);
  CHECK(again.relations == tok.relations);
  auto other = sample_graph(model, templ, {}, schedule, rng_b);
  bool differs = other.categories != tok.categories || other.features != tok.features ||
                 other.actions != tok.actions || other.relations != tok.relations;
  CHECK(differs);
}

TEST_CASE("a fully anchored template passes through sampling verbatim") {
  auto cfg = mini_config();
  Rng init(13);
  nn::SceneTransformer model(cfg, init);
  MaskSchedule schedule{cfg.timesteps};

  Rng data_rng(3);
  auto fixed = clean_tokens(data_rng, cfg, 3);
  GraphTemplate templ;
  templ.n = 3;
  templ.categories = fixed.categories;
  templ.features = fixed.features;
  templ.actions = fixed.actions;
  templ.relations = fixed.relations;

  Rng rng(1);
  auto tok = sample_graph(model, templ, {}, schedule, rng);
  CHECK(tok.categories == fixed.categories);
  CHECK(tok.features == fixed.features);
  CHECK(tok.actions == fixed.actions);
  CHECK(tok.relations == fixed.relations);
}

TEST_CASE("graph sampling validates its template") {
  auto cfg = mini_config();
  Rng init(13);
  nn::SceneTransformer model(cfg, init);
  MaskSchedule schedule{cfg.timesteps};
  Rng rng(1);

  auto empty = GraphTemplate::free_graph(0);
  CHECK_THROWS_AS(sample_graph(model, empty, {}, schedule, rng), Error);

  auto bad_len = GraphTemplate::free_graph(2);
  bad_len.categories.pop_back();
  CHECK_THROWS_AS(sample_graph(model, bad_len, {}, schedule, rng), Error);

  auto bad_value = GraphTemplate::free_graph(2);
  bad_value.categories[0] = cfg.categories;  // mask token is not anchorable
  CHECK_THROWS_AS(sample_graph(model, bad_value, {}, schedule, rng), Error);

  auto bad_rel = GraphTemplate::free_graph(2);
  bad_rel.relations[1] = cfg.relations + 3;
  CHECK_THROWS_AS(sample_graph(model, bad_rel, {}, schedule, rng), Error);
}

// ---------------------------------------------------------------------------
// layout schedule and corruption

TEST_CASE("layout schedule wipes nearly all signal at the horizon") {
  auto s = LayoutSchedule::make();
  CHECK(s.T == 10);
  CHECK(s.beta[1] == doctest::Approx(0.15));
  CHECK(s.beta[10] == doctest::Approx(0.95));

  // independent recomputation of the running product
  double prod = 1.0;
  for (int t = 1; t <= 10; ++t) {
    double beta = 0.15 + (0.95 - 0.15) * (t - 1) / 9.0;
    prod *= 1.0 - beta;
    CHECK(s.alpha[t] == doctest::Approx(1.0 - beta).epsilon(1e-12));
    CHECK(s.alpha_bar[t] == doctest::Approx(prod).epsilon(1e-12));
    CHECK(s.alpha_bar[t] < s.alpha_bar[t - 1]);
  }
  CHECK(s.alpha_bar[10] == doctest::Approx(2.5480955746144766e-5).epsilon(1e-10));
  CHECK(std::sqrt(s.alpha_bar[10]) < 0.05);  // prior end of the chain is noise

  auto single = LayoutSchedule::make(1, 0.5, 0.9);
  CHECK(single.beta[1] == doctest::Approx(0.5));

  CHECK_THROWS_AS(LayoutSchedule::make(0), ConfigError);
  CHECK_THROWS_AS(LayoutSchedule::make(10, 0.0, 0.9), ConfigError);
  CHECK_THROWS_AS(LayoutSchedule::make(10, 0.1, 1.0), ConfigError);
  CHECK_THROWS_AS(LayoutSchedule::make(10, 0.9, 0.1), ConfigError);
}

TEST_CASE("layout corruption matches the closed-form moments") {
  auto s = LayoutSchedule::make();
  const int t = 5;
  double keep = std::sqrt(s.alpha_bar[t]);
  double noise2 = 1.0 - s.alpha_bar[t];

  Tensor x0 = Tensor::filled(1, kLayoutChannels, 2.0);
  Rng rng(123);
  const int trials = 20000;
  double sum = 0.0, sum2 = 0.0;
  const double count = static_cast<double>(trials) * kLayoutChannels;
  for (int k = 0; k < trials; ++k) {
    Tensor xt = corrupt_layout(x0, s, t, rng);
    for (double v : xt.v) {
      sum += v;
      sum2 += v * v;
    }
  }
  double mean = sum / count;
  double var = sum2 / count - mean * mean;
  double mean_tol = 5.0 * std::sqrt(noise2 / count);
  double var_tol = 5.0 * noise2 * std::sqrt(2.0 / count);
  CHECK(std::abs(mean - keep * 2.0) < mean_tol);
  CHECK(std::abs(var - noise2) < var_tol);

  CHECK_THROWS_AS(corrupt_layout(x0, s, 0, rng), Error);
  CHECK_THROWS_AS(corrupt_layout(x0, s, s.T + 1, rng), Error);
}

TEST_CASE("layout loss averages squared error per object") {
  nn::ParamStore store;

  SUBCASE("one object, unit error") {
    Tape tape(&store);
    Tensor pred = Tensor::zeros(1, kLayoutChannels);
    pred.at(0, 0) = 1.0;
    auto id = tape.input(pred);
    auto loss = layout_loss(tape, id, Tensor::zeros(1, kLayoutChannels));
    CHECK(tape.val(loss).v[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("two objects with different errors average to 3/2") {
    Tape tape(&store);
    Tensor pred = Tensor::zeros(2, kLayoutChannels);
    pred.at(0, 0) = 1.0;  // squared error 1
    pred.at(1, 2) = 1.0;  // squared error 2
    pred.at(1, 5) = 1.0;
    auto id = tape.input(pred);
    auto loss = layout_loss(tape, id, Tensor::zeros(2, kLayoutChannels));
    CHECK(tape.val(loss).v[0] == doctest::Approx(1.5).epsilon(1e-12));
  }
  SUBCASE("empty scenes are rejected") {
    Tape tape(&store);
    auto id = tape.input(Tensor::zeros(0, kLayoutChannels));
    CHECK_THROWS_AS(layout_loss(tape, id, Tensor::zeros(0, kLayoutChannels)), Error);
  }
}

// ---------------------------------------------------------------------------
// layout rows and normalization

TEST_CASE("layout rows round trip through the struct form") {
  std::vector<Layout> layouts(2);
  layouts[0] = make_layout(1.0, -2.0, 0.5, 0.4, 0.3, 0.2, 1.57);
  layouts[1] = make_layout(-0.5, 0.25, 0.0, 1.0, 0.8, 0.6, 3.14);

  Tensor rows = layouts_to_rows(layouts);
  CHECK(rows.rows == 2);
  CHECK(rows.cols == kLayoutChannels);
  CHECK(rows.at(0, 0) == doctest::Approx(1.0));
  CHECK(rows.at(1, 4) == doctest::Approx(0.8));

  auto back = rows_to_layouts(rows);
  for (size_t i = 0; i < layouts.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      CHECK(back[i].t[c] == doctest::Approx(layouts[i].t[c]));
      CHECK(back[i].s[c] == doctest::Approx(layouts[i].s[c]));
    }
    CHECK(back[i].rot_cos == doctest::Approx(layouts[i].rot_cos));
    CHECK(back[i].rot_sin == doctest::Approx(layouts[i].rot_sin));
  }

  // off-circle rotations get renormalized on the way back
  Tensor skewed = Tensor::zeros(1, kLayoutChannels);
  skewed.at(0, 3) = skewed.at(0, 4) = skewed.at(0, 5) = 0.1;
  skewed.at(0, 6) = 3.0;
  skewed.at(0, 7) = 4.0;
  auto fixed = rows_to_layouts(skewed);
  CHECK(fixed[0].rot_cos == doctest::Approx(0.6));
  CHECK(fixed[0].rot_sin == doctest::Approx(0.8));

  CHECK_THROWS_AS(rows_to_layouts(Tensor::zeros(1, 7)), Error);
}

TEST_CASE("layout normalization round trips values and JSON") {
  Tensor a = Tensor::zeros(2, kLayoutChannels);
  Tensor b = Tensor::zeros(1, kLayoutChannels);
  // channel 0 takes values {1, 3, 2}; channel 6/7 carry off-circle garbage
  a.at(0, 0) = 1.0;
  a.at(1, 0) = 3.0;
  b.at(0, 0) = 2.0;
  a.at(0, 6) = 5.0;
  a.at(1, 7) = -4.0;

  auto stats = LayoutNormStats::fit({a, b});
  CHECK(stats.mean[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(stats.stdev[0] ==
        doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  CHECK(stats.mean[6] == doctest::Approx(0.0));  // rotation channels stay raw
  CHECK(stats.stdev[6] == doctest::Approx(1.0));
  CHECK(stats.mean[7] == doctest::Approx(0.0));
  CHECK(stats.stdev[7] == doctest::Approx(1.0));

  Tensor normed = stats.normalize(a);
  CHECK(normed.at(0, 6) == doctest::Approx(5.0));  // untouched by construction
  Tensor back = stats.denormalize(normed);
  for (size_t k = 0; k < a.v.size(); ++k)
    CHECK(back.v[k] == doctest::Approx(a.v[k]).epsilon(1e-12));

  auto reparsed = LayoutNormStats::from_json(stats.to_json());
  for (int c = 0; c < kLayoutChannels; ++c) {
    CHECK(reparsed.mean[c] == stats.mean[c]);
    CHECK(reparsed.stdev[c] == stats.stdev[c]);
  }

  // a constant channel gets the variance floor, not a zero divide
  auto flat = LayoutNormStats::fit({Tensor::filled(4, kLayoutChannels, 1.5)});
  CHECK(flat.stdev[0] == doctest::Approx(1e-4));
  Tensor probe = flat.normalize(Tensor::filled(1, kLayoutChannels, 1.5));
  CHECK(std::isfinite(probe.at(0, 0)));

  CHECK_THROWS_AS(LayoutNormStats::fit({}), InsufficientDataError);
  CHECK_THROWS_AS(LayoutNormStats::fit({Tensor::zeros(1, 5)}), Error);
  CHECK_THROWS_AS(LayoutNormStats::from_json("not json"), FileFormatError);
  CHECK_THROWS_AS(LayoutNormStats::from_json(R"({"mean": [1, 2]})"),
                  FileFormatError);
}

// ---------------------------------------------------------------------------
// layout training and sampling

TEST_CASE("layout training drives the loss down on a tiny corpus") {
  auto cfg = mini_config(true);
  Rng init(41);
  nn::SceneTransformer model(cfg, init);

  Rng data_rng(6);
  std::vector<LayoutExample> data;
  std::vector<Tensor> blocks;
  for (int k = 0; k < 2; ++k) {
    LayoutExample ex;
    ex.graph = clean_tokens(data_rng, cfg, 2);
    ex.rows = Tensor::zeros(2, kLayoutChannels);
    for (double& v : ex.rows.v) v = data_rng.uniform(-1.0, 1.0);
    ex.rows.at(0, 6) = 1.0;  // keep rotations on the circle
    ex.rows.at(0, 7) = 0.0;
    ex.rows.at(1, 6) = 0.0;
    ex.rows.at(1, 7) = 1.0;
    ex.lambda = random_lambda(data_rng, cfg.lambda_dim);
    blocks.push_back(ex.rows);
    data.push_back(std::move(ex));
  }
  auto norm = LayoutNormStats::fit(blocks);

  LayoutTrainConfig tc;
  tc.steps = 60;
  tc.batch_size = 2;
  tc.optim.lr = 3e-3;
  tc.log_every = 1000;

  double first = 0.0;
  bool have_first = false;
  Rng rng(17);
  double last = train_layout_model(model, data, norm, tc, rng,
                                   [&](int, double running) {
                                     if (!have_first) {
                                       first = running;
                                       have_first = true;
                                     }
                                   });
  CHECK(have_first);
  CHECK(std::isfinite(last));
  CHECK(last < first);

  CHECK_THROWS_AS(train_layout_model(model, {}, norm, tc, rng),
                  InsufficientDataError);

  auto graph_cfg = mini_config(false);
  Rng init2(42);
  nn::SceneTransformer graph_only(graph_cfg, init2);
  CHECK_THROWS_AS(train_layout_model(graph_only, data, norm, tc, rng),
                  ConfigError);
}

TEST_CASE("layout sampling pins frozen rows bit for bit") {
  auto cfg = mini_config(true);
  Rng init(51);
  nn::SceneTransformer model(cfg, init);
  auto schedule = LayoutSchedule::make(cfg.timesteps);

  Rng data_rng(9);
  auto graph = clean_tokens(data_rng, cfg, 3);
  Tensor block = Tensor::zeros(3, kLayoutChannels);
  for (double& v : block.v) v = data_rng.uniform(-2.0, 2.0);
  auto norm = LayoutNormStats::fit({block});

  Tensor frozen_rows = Tensor::zeros(3, kLayoutChannels);
  frozen_rows.at(0, 0) = 0.123456789;
  frozen_rows.at(0, 1) = -1.5;
  frozen_rows.at(0, 2) = 0.25;
  frozen_rows.at(0, 3) = 0.4;
  frozen_rows.at(0, 4) = 0.3;
  frozen_rows.at(0, 5) = 0.35;
  frozen_rows.at(0, 6) = std::cos(0.3);
  frozen_rows.at(0, 7) = std::sin(0.3);
  std::vector<bool> frozen{true, false, false};

  Rng rng(2024);
  Tensor rows = sample_layout_rows(model, graph, {}, norm, schedule, rng,
                                   &frozen_rows, &frozen);
  CHECK(rows.rows == 3);
  CHECK(rows.cols == kLayoutChannels);
  for (int c = 0; c < kLayoutChannels; ++c)
    CHECK(rows.at(0, c) == frozen_rows.at(0, c));  // exact, not approximate
  for (int r = 1; r < 3; ++r)
    for (int c = 0; c < kLayoutChannels; ++c) CHECK(std::isfinite(rows.at(r, c)));

  // deterministic per seed
  Rng rng_a(2024);
  Tensor again = sample_layout_rows(model, graph, {}, norm, schedule, rng_a,
                                    &frozen_rows, &frozen);
  CHECK(again.v == rows.v);

  // free-running invocation works and differs from the pinned one
  Rng rng_b(31);
  Tensor free_rows = sample_layout_rows(model, graph, {}, norm, schedule, rng_b);
  CHECK(free_rows.rows == 3);

  SUBCASE("mismatched frozen arguments are rejected") {
    Rng r2(1);
    CHECK_THROWS_AS(sample_layout_rows(model, graph, {}, norm, schedule, r2,
                                       &frozen_rows, nullptr),
                    Error);
    std::vector<bool> short_flags{true, false};
    CHECK_THROWS_AS(sample_layout_rows(model, graph, {}, norm, schedule, r2,
                                       &frozen_rows, &short_flags),
                    Error);
  }
  SUBCASE("a graph-only model cannot sample layouts") {
    auto graph_cfg = mini_config(false);
    Rng init2(52);
    nn::SceneTransformer graph_only(graph_cfg, init2);
    Rng r2(1);
    CHECK_THROWS_AS(sample_layout_rows(graph_only, graph, {}, norm, schedule, r2),
                    ConfigError);
  }
}
