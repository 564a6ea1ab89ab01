#include "roomforge/diffusion/continuous.hpp"

#include <cmath>

#include <json.hpp>

#include "roomforge/errors.hpp"

namespace roomforge::diffusion {

LayoutSchedule LayoutSchedule::make(int T, double beta_start, double beta_end) {
  if (T < 1) throw ConfigError("layout schedule needs at least one step");
  if (beta_start <= 0.0 || beta_end >= 1.0 || beta_end < beta_start)
    throw ConfigError("layout schedule betas must satisfy 0 < start <= end < 1");
  LayoutSchedule s;
  s.T = T;
  s.beta.assign(static_cast<size_t>(T) + 1, 0.0);
  s.alpha.assign(static_cast<size_t>(T) + 1, 1.0);
  s.alpha_bar.assign(static_cast<size_t>(T) + 1, 1.0);
  for (int t = 1; t <= T; ++t) {
    double frac = T == 1 ? 0.0 : static_cast<double>(t - 1) / (T - 1);
    s.beta[t] = beta_start + (beta_end - beta_start) * frac;
    s.alpha[t] = 1.0 - s.beta[t];
    s.alpha_bar[t] = s.alpha_bar[t - 1] * s.alpha[t];
  }
  return s;
}

Tensor layouts_to_rows(const std::vector<Layout>& layouts) {
  Tensor rows(static_cast<int>(layouts.size()), kLayoutChannels);
  for (size_t i = 0; i < layouts.size(); ++i) {
    const Layout& l = layouts[i];
    int r = static_cast<int>(i);
    rows.at(r, 0) = l.t[0];
    rows.at(r, 1) = l.t[1];
    rows.at(r, 2) = l.t[2];
    rows.at(r, 3) = l.s[0];
    rows.at(r, 4) = l.s[1];
    rows.at(r, 5) = l.s[2];
    rows.at(r, 6) = l.rot_cos;
    rows.at(r, 7) = l.rot_sin;
  }
  return rows;
}

std::vector<Layout> rows_to_layouts(const Tensor& rows) {
  if (rows.cols != kLayoutChannels) throw Error("layout rows must have 8 channels");
  std::vector<Layout> out(static_cast<size_t>(rows.rows));
  for (int r = 0; r < rows.rows; ++r) {
    Layout& l = out[static_cast<size_t>(r)];
    l.t[0] = rows.at(r, 0);
    l.t[1] = rows.at(r, 1);
    l.t[2] = rows.at(r, 2);
    l.s[0] = rows.at(r, 3);
    l.s[1] = rows.at(r, 4);
    l.s[2] = rows.at(r, 5);
    l.rot_cos = rows.at(r, 6);
    l.rot_sin = rows.at(r, 7);
    l.renormalize_rotation();
  }
  return out;
}

LayoutNormStats LayoutNormStats::fit(const std::vector<Tensor>& row_blocks) {
  LayoutNormStats stats;
  stats.mean.fill(0.0);
  stats.stdev.fill(1.0);
  size_t count = 0;
  std::array<double, kLayoutChannels> sum{}, sum2{};
  for (const Tensor& block : row_blocks) {
    if (block.cols != kLayoutChannels) throw Error("layout rows must have 8 channels");
    for (int r = 0; r < block.rows; ++r) {
      for (int c = 0; c < kLayoutChannels; ++c) {
        sum[static_cast<size_t>(c)] += block.at(r, c);
        sum2[static_cast<size_t>(c)] += block.at(r, c) * block.at(r, c);
      }
      ++count;
    }
  }
  if (count == 0) throw InsufficientDataError("no layout rows to fit statistics on");
  for (int c = 0; c < 6; ++c) {  // rotation channels stay raw
    double m = sum[static_cast<size_t>(c)] / static_cast<double>(count);
    double var = sum2[static_cast<size_t>(c)] / static_cast<double>(count) - m * m;
    stats.mean[static_cast<size_t>(c)] = m;
    stats.stdev[static_cast<size_t>(c)] = std::sqrt(std::max(var, 1e-8));
  }
  return stats;
}

Tensor LayoutNormStats::normalize(const Tensor& raw) const {
  Tensor out = raw;
  for (int r = 0; r < out.rows; ++r)
    for (int c = 0; c < kLayoutChannels; ++c)
      out.at(r, c) = (out.at(r, c) - mean[static_cast<size_t>(c)]) /
                     stdev[static_cast<size_t>(c)];
  return out;
}

Tensor LayoutNormStats::denormalize(const Tensor& normed) const {
  Tensor out = normed;
  for (int r = 0; r < out.rows; ++r)
    for (int c = 0; c < kLayoutChannels; ++c)
      out.at(r, c) = out.at(r, c) * stdev[static_cast<size_t>(c)] +
                     mean[static_cast<size_t>(c)];
  return out;
}

std::string LayoutNormStats::to_json() const {
  nlohmann::json j;
  j["mean"] = mean;
  j["stdev"] = stdev;
  return j.dump();
}

LayoutNormStats LayoutNormStats::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("mean") || !j.contains("stdev"))
    throw FileFormatError("<norm stats>", 0, "invalid layout statistics JSON");
  LayoutNormStats stats;
  auto mean = j["mean"].get<std::vector<double>>();
  auto stdev = j["stdev"].get<std::vector<double>>();
  if (mean.size() != kLayoutChannels || stdev.size() != kLayoutChannels)
    throw FileFormatError("<norm stats>", 0, "layout statistics need 8 channels");
  std::copy(mean.begin(), mean.end(), stats.mean.begin());
  std::copy(stdev.begin(), stdev.end(), stats.stdev.begin());
  return stats;
}

Tensor corrupt_layout(const Tensor& x0, const LayoutSchedule& schedule, int t,
                      Rng& rng) {
  if (t < 1 || t > schedule.T) throw Error("corruption step outside schedule");
  double keep = std::sqrt(schedule.alpha_bar[static_cast<size_t>(t)]);
  double noise = std::sqrt(1.0 - schedule.alpha_bar[static_cast<size_t>(t)]);
  Tensor out = x0;
  for (double& x : out.v) x = keep * x + noise * rng.normal();
  return out;
}

Tape::Id layout_loss(Tape& tape, Tape::Id predicted_x0, const Tensor& clean_x0) {
  if (clean_x0.rows < 1) throw Error("layout loss needs at least one object");
  std::vector<double> w(static_cast<size_t>(clean_x0.rows),
                        1.0 / clean_x0.rows);
  return tape.mse(predicted_x0, clean_x0, w);
}

double train_layout_model(SceneTransformer& model,
                          const std::vector<LayoutExample>& data,
                          const LayoutNormStats& norm, const LayoutTrainConfig& cfg,
                          Rng& rng,
                          const std::function<void(int, double)>& progress) {
  if (data.empty()) throw InsufficientDataError("layout training set is empty");
  if (!model.config().layout_io)
    throw ConfigError("layout training needs a model built with layout_io");
  LayoutSchedule schedule = LayoutSchedule::make(model.config().timesteps);
  nn::AdamW opt(cfg.optim);
  const std::vector<double> no_condition;

  double running = 0.0;
  bool have_running = false;
  for (int step = 0; step < cfg.steps; ++step) {
    double batch_loss = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const LayoutExample& ex = data[rng.index(data.size())];
      int t = 1 + static_cast<int>(rng.index(static_cast<size_t>(schedule.T)));
      Tensor x0 = norm.normalize(ex.rows);
      Tensor xt = corrupt_layout(x0, schedule, t, rng);
      const auto& lambda =
          rng.uniform01() < cfg.cond_dropout ? no_condition : ex.lambda;

      Tape tape(&model.params(), &rng);
      auto out = model.forward(tape, ex.graph, lambda, t, &xt);
      auto loss = layout_loss(tape, out.layout, x0);
      auto scaled = tape.scale(loss, 1.0 / cfg.batch_size);
      batch_loss += tape.val(scaled).v[0];
      tape.backward(scaled);
    }
    if (!std::isfinite(batch_loss))
      throw TrainingDivergedError("layout model loss is not finite at step " +
                                  std::to_string(step));
    opt.step(model.params());

    running = have_running ? 0.98 * running + 0.02 * batch_loss : batch_loss;
    have_running = true;
    if (progress && (step % cfg.log_every == 0 || step + 1 == cfg.steps))
      progress(step, running);
  }
  return running;
}

Tensor sample_layout_rows(SceneTransformer& model, const nn::GraphTokens& graph,
                          const std::vector<double>& lambda,
                          const LayoutNormStats& norm, const LayoutSchedule& schedule,
                          Rng& rng, const Tensor* frozen_rows,
                          const std::vector<bool>* frozen) {
  if (!model.config().layout_io)
    throw ConfigError("layout sampling needs a model built with layout_io");
  const int n = graph.n;
  const bool has_frozen = frozen != nullptr && frozen_rows != nullptr;
  if ((frozen == nullptr) != (frozen_rows == nullptr))
    throw Error("frozen rows and the frozen flags must be passed together");
  if (has_frozen && (static_cast<int>(frozen->size()) != n ||
                     frozen_rows->rows != n || frozen_rows->cols != kLayoutChannels))
    throw Error("frozen layout inputs do not match the node count");

  Tensor frozen_x0(n, kLayoutChannels);
  if (has_frozen) frozen_x0 = norm.normalize(*frozen_rows);

  auto pin_frozen = [&](Tensor& x, int t) {
    if (!has_frozen) return;
    // carry properly-noised copies of the pinned rows so the model sees
    // inputs from the distribution it was trained on
    double keep = t == 0 ? 1.0 : std::sqrt(schedule.alpha_bar[static_cast<size_t>(t)]);
    double noise = t == 0 ? 0.0 : std::sqrt(1.0 - schedule.alpha_bar[static_cast<size_t>(t)]);
    for (int i = 0; i < n; ++i) {
      if (!(*frozen)[static_cast<size_t>(i)]) continue;
      for (int c = 0; c < kLayoutChannels; ++c)
        x.at(i, c) = keep * frozen_x0.at(i, c) + noise * rng.normal();
    }
  };

  Tensor xt(n, kLayoutChannels);
  for (double& x : xt.v) x = rng.normal();
  pin_frozen(xt, schedule.T);

  for (int t = schedule.T; t >= 1; --t) {
    Tape tape(&model.params());
    auto out = model.forward(tape, graph, lambda, t, &xt);
    const Tensor& x0hat = tape.val(out.layout);

    double ab_t = schedule.alpha_bar[static_cast<size_t>(t)];
    double ab_prev = schedule.alpha_bar[static_cast<size_t>(t) - 1];
    double beta_t = schedule.beta[static_cast<size_t>(t)];
    double alpha_t = schedule.alpha[static_cast<size_t>(t)];
    double c0 = std::sqrt(ab_prev) * beta_t / (1.0 - ab_t);
    double ct = std::sqrt(alpha_t) * (1.0 - ab_prev) / (1.0 - ab_t);
    double var = (1.0 - ab_prev) / (1.0 - ab_t) * beta_t;
    double sigma = t > 1 ? std::sqrt(var) : 0.0;

    Tensor next(n, kLayoutChannels);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < kLayoutChannels; ++c) {
        double mu = c0 * x0hat.at(i, c) + ct * xt.at(i, c);
        next.at(i, c) = mu + (sigma > 0.0 ? sigma * rng.normal() : 0.0);
      }
    xt = std::move(next);
    pin_frozen(xt, t - 1);
  }

  Tensor rows = norm.denormalize(xt);
  if (has_frozen) {
    // bitwise passthrough of pinned inputs
    for (int i = 0; i < n; ++i)
      if ((*frozen)[static_cast<size_t>(i)])
        for (int c = 0; c < kLayoutChannels; ++c)
          rows.at(i, c) = frozen_rows->at(i, c);
  }
  return rows;
}

}  // namespace roomforge::diffusion
