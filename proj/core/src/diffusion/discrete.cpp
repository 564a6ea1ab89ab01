#include "roomforge/diffusion/discrete.hpp"

#include <cmath>
#include <limits>

#include "roomforge/errors.hpp"
#include "roomforge/types.hpp"

namespace roomforge::diffusion {

namespace {

void check_template(const GraphTemplate& templ, const nn::TransformerConfig& cfg) {
  const int n = templ.n;
  if (n < 1) throw Error("graph template needs at least one node");
  auto check_attr = [&](const std::vector<int>& v, int limit, const char* what) {
    if (static_cast<int>(v.size()) != n)
      throw Error(std::string("graph template ") + what + " has the wrong length");
    for (int x : v)
      if (x < -1 || x >= limit)
        throw Error(std::string("graph template ") + what + " value out of range");
  };
  check_attr(templ.categories, cfg.categories, "categories");
  check_attr(templ.features, cfg.features, "features");
  check_attr(templ.actions, cfg.actions, "actions");
  if (static_cast<int>(templ.relations.size()) != n * n)
    throw Error("graph template relations must be n*n");
  for (int x : templ.relations)
    if (x < -1 || x >= cfg.relations)
      throw Error("graph template relation value out of range");
}

std::vector<double> clean_class_probs(const nn::Tensor& logits, int row,
                                      int clean_classes) {
  // softmax over the clean alphabet; the mask column is not a sample target
  double m = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < clean_classes; ++j) m = std::max(m, logits.at(row, j));
  std::vector<double> p(static_cast<size_t>(clean_classes));
  double z = 0.0;
  for (int j = 0; j < clean_classes; ++j) {
    p[static_cast<size_t>(j)] = std::exp(logits.at(row, j) - m);
    z += p[static_cast<size_t>(j)];
  }
  for (double& x : p) x /= z;
  return p;
}

}  // namespace

GraphTemplate GraphTemplate::free_graph(int n) {
  GraphTemplate t;
  t.n = n;
  t.categories.assign(static_cast<size_t>(n), -1);
  t.features.assign(static_cast<size_t>(n), -1);
  t.actions.assign(static_cast<size_t>(n), -1);
  t.relations.assign(static_cast<size_t>(n) * n, -1);
  return t;
}

GraphTokens corrupt_graph(const GraphTokens& clean, const MaskSchedule& schedule,
                          int t, const nn::TransformerConfig& cfg, Rng& rng,
                          const GraphTemplate* templ) {
  if (t < 1 || t > schedule.T) throw Error("corruption step outside schedule");
  const int n = clean.n;
  const double p = schedule.masked_marginal(t);
  GraphTokens out = clean;
  auto corrupt_attr = [&](std::vector<int>& tokens, const std::vector<int>* anchor,
                          int mask_token) {
    for (int i = 0; i < n; ++i) {
      if (anchor && (*anchor)[static_cast<size_t>(i)] >= 0) continue;
      if (rng.uniform01() < p) tokens[static_cast<size_t>(i)] = mask_token;
    }
  };
  corrupt_attr(out.categories, templ ? &templ->categories : nullptr, cfg.categories);
  corrupt_attr(out.features, templ ? &templ->features : nullptr, cfg.features);
  corrupt_attr(out.actions, templ ? &templ->actions : nullptr, cfg.actions);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;  // structural None, never noised
      size_t k = static_cast<size_t>(i) * n + j;
      if (templ && templ->relations[k] >= 0) continue;
      if (rng.uniform01() < p) out.relations[k] = cfg.relations;
    }
  return out;
}

Tape::Id graph_loss(Tape& tape, const nn::DenoiserOutput& out,
                    const GraphTokens& clean, const GraphTokens& corrupted,
                    const nn::TransformerConfig& cfg, const GraphLossWeights& w) {
  const int n = clean.n;

  auto node_term = [&](Tape::Id logits, const std::vector<int>& clean_tokens,
                       const std::vector<int>& corrupted_tokens, int mask_token) {
    std::vector<double> weights(static_cast<size_t>(n), 0.0);
    int masked = 0;
    for (int i = 0; i < n; ++i)
      if (corrupted_tokens[static_cast<size_t>(i)] == mask_token) ++masked;
    if (masked > 0)
      for (int i = 0; i < n; ++i)
        if (corrupted_tokens[static_cast<size_t>(i)] == mask_token)
          weights[static_cast<size_t>(i)] = 1.0 / masked;
    return tape.cross_entropy(logits, clean_tokens, weights);
  };

  auto lc = node_term(out.cat_logits, clean.categories, corrupted.categories,
                      cfg.categories);
  auto lf = node_term(out.feat_logits, clean.features, corrupted.features,
                      cfg.features);
  auto la = node_term(out.act_logits, clean.actions, corrupted.actions, cfg.actions);

  std::vector<double> rel_weights(static_cast<size_t>(n) * n, 0.0);
  int masked_rel = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j &&
          corrupted.relations[static_cast<size_t>(i) * n + j] == cfg.relations)
        ++masked_rel;
  if (masked_rel > 0)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        size_t k = static_cast<size_t>(i) * n + j;
        if (i != j && corrupted.relations[k] == cfg.relations)
          rel_weights[k] = 1.0 / masked_rel;
      }
  auto lr = tape.cross_entropy(out.rel_logits, clean.relations, rel_weights);

  auto total = tape.scale(lc, w.delta_class);
  total = tape.add_scaled(total, tape.add(lf, la), w.delta_feature);
  total = tape.add_scaled(total, lr, w.delta_edge);
  return total;
}

double train_graph_model(SceneTransformer& model,
                         const std::vector<GraphExample>& data,
                         const GraphTrainConfig& cfg, Rng& rng,
                         const std::function<void(int, double)>& progress) {
  if (data.empty()) throw InsufficientDataError("graph training set is empty");
  MaskSchedule schedule{model.config().timesteps};
  nn::OptimConfig optim = cfg.optim;
  nn::AdamW opt(optim);
  const int switch_step = static_cast<int>(cfg.switch_frac * cfg.steps);
  const std::vector<double> no_condition;

  double running = 0.0;
  bool have_running = false;
  for (int step = 0; step < cfg.steps; ++step) {
    GraphLossWeights w;
    w.delta_class = step < switch_step ? 1.0 : 0.0;
    w.delta_feature = w.delta_class;
    w.delta_edge = cfg.delta_edge;

    double batch_loss = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const GraphExample& ex = data[rng.index(data.size())];
      int t = 1 + static_cast<int>(rng.index(static_cast<size_t>(schedule.T)));
      GraphTokens corrupted = corrupt_graph(ex.clean, schedule, t, model.config(), rng);
      const auto& lambda =
          rng.uniform01() < cfg.cond_dropout ? no_condition : ex.lambda;

      Tape tape(&model.params(), &rng);
      auto out = model.forward(tape, corrupted, lambda, t);
      auto loss = graph_loss(tape, out, ex.clean, corrupted, model.config(), w);
      auto scaled = tape.scale(loss, 1.0 / cfg.batch_size);
      batch_loss += tape.val(scaled).v[0];
      tape.backward(scaled);
    }
    if (!std::isfinite(batch_loss))
      throw TrainingDivergedError("graph model loss is not finite at step " +
                                  std::to_string(step));
    opt.step(model.params());

    running = have_running ? 0.98 * running + 0.02 * batch_loss : batch_loss;
    have_running = true;
    if (progress && (step % cfg.log_every == 0 || step + 1 == cfg.steps))
      progress(step, running);
  }
  return running;
}

GraphTokens sample_graph(SceneTransformer& model, const GraphTemplate& templ,
                         const std::vector<double>& lambda,
                         const MaskSchedule& schedule, Rng& rng) {
  const auto& cfg = model.config();
  check_template(templ, cfg);
  const int n = templ.n;
  const int none_rel = kRelationCount - 1;

  GraphTokens tok;
  tok.n = n;
  tok.categories.resize(static_cast<size_t>(n));
  tok.features.resize(static_cast<size_t>(n));
  tok.actions.resize(static_cast<size_t>(n));
  tok.relations.resize(static_cast<size_t>(n) * n);

  const double anchored = std::numeric_limits<double>::infinity();
  std::vector<double> rel_conf(static_cast<size_t>(n) * n, anchored);
  int masked_left = 0;

  for (int i = 0; i < n; ++i) {
    auto take = [&](const std::vector<int>& fixed, std::vector<int>& dst,
                    int mask_token) {
      if (fixed[static_cast<size_t>(i)] >= 0) {
        dst[static_cast<size_t>(i)] = fixed[static_cast<size_t>(i)];
      } else {
        dst[static_cast<size_t>(i)] = mask_token;
        ++masked_left;
      }
    };
    take(templ.categories, tok.categories, cfg.categories);
    take(templ.features, tok.features, cfg.features);
    take(templ.actions, tok.actions, cfg.actions);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      size_t k = static_cast<size_t>(i) * n + j;
      if (i == j) {
        tok.relations[k] = none_rel;  // structural
      } else if (templ.relations[k] >= 0) {
        tok.relations[k] = templ.relations[k];
      } else {
        tok.relations[k] = cfg.relations;
        rel_conf[k] = 0.0;
        ++masked_left;
      }
    }

  for (int t = schedule.T; t >= 1 && masked_left > 0; --t) {
    Tape tape(&model.params());
    auto out = model.forward(tape, tok, lambda, t);
    const double reveal = schedule.reveal_prob(t);

    auto reveal_attr = [&](std::vector<int>& tokens, int mask_token, Tape::Id logits,
                           int clean_classes) {
      const nn::Tensor& L = tape.val(logits);
      for (int i = 0; i < n; ++i) {
        if (tokens[static_cast<size_t>(i)] != mask_token) continue;
        if (rng.uniform01() >= reveal) continue;
        auto probs = clean_class_probs(L, i, clean_classes);
        size_t pick = rng.weighted_index(probs);
        tokens[static_cast<size_t>(i)] = static_cast<int>(pick);
        --masked_left;
      }
    };
    reveal_attr(tok.categories, cfg.categories, out.cat_logits, cfg.categories);
    reveal_attr(tok.features, cfg.features, out.feat_logits, cfg.features);
    reveal_attr(tok.actions, cfg.actions, out.act_logits, cfg.actions);

    const nn::Tensor& RL = tape.val(out.rel_logits);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        size_t k = static_cast<size_t>(i) * n + j;
        if (tok.relations[k] != cfg.relations) continue;
        if (rng.uniform01() >= reveal) continue;
        auto probs = clean_class_probs(RL, static_cast<int>(k), cfg.relations);
        size_t pick = rng.weighted_index(probs);
        tok.relations[k] = static_cast<int>(pick);
        rel_conf[k] = probs[pick];
        --masked_left;
      }
  }

  // reconcile directed pairs: the more confident direction dictates both
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      size_t ij = static_cast<size_t>(i) * n + j;
      size_t ji = static_cast<size_t>(j) * n + i;
      auto p = static_cast<RelationPredicate>(tok.relations[ij]);
      auto q = static_cast<RelationPredicate>(tok.relations[ji]);
      if (q == inverse_predicate(p)) continue;
      if (rel_conf[ij] >= rel_conf[ji])
        tok.relations[ji] = static_cast<int>(inverse_predicate(p));
      else
        tok.relations[ij] = static_cast<int>(inverse_predicate(q));
    }
  return tok;
}

}  // namespace roomforge::diffusion
