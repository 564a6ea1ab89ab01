#include "roomforge/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "roomforge/errors.hpp"
#include "roomforge/eval.hpp"
#include "roomforge/json_writer.hpp"
#include "roomforge/nn/checkpoint.hpp"
#include "roomforge/prompt/embed.hpp"
#include "roomforge/rng.hpp"

namespace roomforge {

namespace {

std::string slurp_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UntrainedModelError("cannot read artifact " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nn::TransformerConfig base_config(int layers, int heads, int width, int edge_width) {
  nn::TransformerConfig cfg;
  cfg.layers = layers;
  cfg.heads = heads;
  cfg.width = width;
  cfg.edge_width = edge_width;
  return cfg;
}

// alphabet sizes every stage shares for one scene type
void fill_alphabets(nn::TransformerConfig& cfg, const CategoryVocabulary& vocab) {
  cfg.categories = vocab.size();
  cfg.features = assembly::kCodebookSize;
  cfg.actions = kActionCount;
  cfg.relations = kRelationCount;
}

}  // namespace

// ---------------------------------------------------------------------------
// profiles

ModelProfile ModelProfile::desk() {
  ModelProfile p;
  p.name = "desk";
  p.graph = base_config(2, 4, 64, 32);
  p.graph.timesteps = 100;
  p.layout = base_config(2, 4, 64, 32);
  p.layout.timesteps = 10;
  p.layout.layout_io = true;
  p.graph_train.steps = 3000;
  p.graph_train.batch_size = 32;
  p.layout_train.steps = 3000;
  p.layout_train.batch_size = 32;
  return p;
}

ModelProfile ModelProfile::paper() {
  ModelProfile p;
  p.name = "paper";
  p.graph = base_config(5, 8, 512, 128);
  p.graph.timesteps = 100;
  p.layout = base_config(5, 8, 512, 128);
  p.layout.timesteps = 10;
  p.layout.layout_io = true;
  p.graph_train.steps = 30000;
  p.graph_train.batch_size = 128;
  p.layout_train.steps = 30000;
  p.layout_train.batch_size = 128;
  return p;
}

ModelProfile ModelProfile::named(const std::string& name) {
  if (name == "desk") return desk();
  if (name == "paper") return paper();
  throw ConfigError("unknown model profile '" + name + "' (expected desk or paper)");
}

// ---------------------------------------------------------------------------
// record views

diffusion::GraphExample graph_example_from_record(const corpus::SceneRecord& rec,
                                                  int lambda_dim) {
  diffusion::GraphExample ex;
  ex.clean = rec.graph;
  ex.lambda = prompt::embed_prompt(rec.caption, lambda_dim);
  return ex;
}

diffusion::LayoutExample layout_example_from_record(const corpus::SceneRecord& rec,
                                                    int lambda_dim) {
  diffusion::LayoutExample ex;
  ex.graph = rec.graph;
  std::vector<Layout> layouts;
  layouts.reserve(rec.scene.objects.size());
  for (const SceneObject& obj : rec.scene.objects) layouts.push_back(obj.layout);
  ex.rows = diffusion::layouts_to_rows(layouts);
  ex.lambda = prompt::embed_prompt(rec.caption, lambda_dim);
  return ex;
}

nn::GraphTokens graph_tokens_from_scene(const Scene& scene,
                                        const CategoryVocabulary& vocab) {
  const int n = static_cast<int>(scene.objects.size());
  nn::GraphTokens tokens;
  tokens.n = n;
  tokens.relations.assign(static_cast<size_t>(n) * static_cast<size_t>(n),
                          static_cast<int>(RelationPredicate::None));
  for (int i = 0; i < n; ++i) {
    const SceneObject& obj = scene.objects[static_cast<size_t>(i)];
    auto cat = vocab.index_of(obj.category);
    if (!cat)
      throw Error("scene object category '" + obj.category +
                  "' is not in the " + vocab.scene_type_name() + " vocabulary");
    tokens.categories.push_back(*cat);
    tokens.features.push_back(obj.feature_code);
    tokens.actions.push_back(static_cast<int>(obj.action));
  }
  RelationRuleConfig rules;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j)
        tokens.relations[static_cast<size_t>(i * n + j)] = static_cast<int>(
            dominant_relation(scene.objects[static_cast<size_t>(j)].layout,
                              scene.objects[static_cast<size_t>(i)].layout, rules));
  return tokens;
}

// ---------------------------------------------------------------------------
// training

TrainReport train_pipeline(const corpus::Corpus& corpus, const ModelProfile& profile,
                           const std::filesystem::path& out_dir, std::uint64_t seed,
                           const std::function<void(const std::string&)>& log) {
  auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };

  auto train_records = corpus::split_records(corpus, "train");
  if (train_records.empty())
    throw InsufficientDataError("corpus has no records in the train split");

  auto registry = SceneTypeRegistry::with_builtins();
  const SceneTypeSpec& spec = registry.get(corpus.scene_type);
  auto lexicon = prompt::PhraseLexicon::builtin();

  std::filesystem::create_directories(out_dir);

  // the catalog and codebook are deterministic in (vocabulary, styles), so
  // they reproduce exactly what corpus generation quantized against
  auto catalog = assembly::make_builtin_catalog(spec.vocab, lexicon.style_adjectives());
  std::vector<std::vector<double>> features;
  features.reserve(static_cast<size_t>(catalog.size()));
  for (const assembly::Asset& a : catalog.assets()) features.push_back(a.feature);
  auto codebook = assembly::fit_codebook(features, assembly::kCodebookSize);

  TrainReport report;
  report.train_records = static_cast<int>(train_records.size());
  report.catalog_path = out_dir / kCatalogFile;
  report.codebook_path = out_dir / kCodebookFile;
  {
    std::ofstream out(report.catalog_path, std::ios::binary);
    out << assembly::catalog_to_json(catalog);
    std::ofstream out2(report.codebook_path, std::ios::binary);
    out2 << codebook.to_json();
    if (!out || !out2) throw Error("cannot write assets under " + out_dir.string());
  }

  nn::TransformerConfig graph_cfg = profile.graph;
  fill_alphabets(graph_cfg, spec.vocab);
  nn::TransformerConfig layout_cfg = profile.layout;
  fill_alphabets(layout_cfg, spec.vocab);

  // node-count histogram drives how many objects synthesis samples
  std::vector<int> histogram(static_cast<size_t>(spec.max_objects) + 1, 0);
  for (const corpus::SceneRecord* rec : train_records)
    if (rec->graph.n >= 0 && rec->graph.n <= spec.max_objects)
      ++histogram[static_cast<size_t>(rec->graph.n)];

  // ----- graph denoiser -----
  say("training graph denoiser on " + std::to_string(train_records.size()) +
      " scenes");
  std::vector<diffusion::GraphExample> graph_data;
  graph_data.reserve(train_records.size());
  for (const corpus::SceneRecord* rec : train_records)
    graph_data.push_back(graph_example_from_record(*rec, graph_cfg.lambda_dim));

  Rng graph_init(Rng::mix(seed + 1));
  nn::SceneTransformer graph_model(graph_cfg, graph_init);
  Rng graph_rng(Rng::mix(seed + 2));
  report.final_graph_loss = diffusion::train_graph_model(
      graph_model, graph_data, profile.graph_train, graph_rng,
      [&](int step, double loss) {
        say("graph step " + std::to_string(step) + " loss " + std::to_string(loss));
      });

  {
    JsonWriter extra;
    extra.begin_object();
    extra.key("scene_type");
    extra.value(corpus.scene_type);
    extra.key("size_histogram");
    extra.begin_array();
    for (int c : histogram) extra.value_int(c);
    extra.end_array();
    extra.end_object();
    nn::CheckpointMeta meta{"graph_denoiser", graph_cfg, extra.str()};
    report.graph_checkpoint = out_dir / kGraphCheckpointFile;
    nn::save_checkpoint(report.graph_checkpoint, meta, graph_model.params());
  }

  // ----- layout denoiser -----
  say("training layout denoiser");
  std::vector<diffusion::LayoutExample> layout_data;
  layout_data.reserve(train_records.size());
  std::vector<nn::Tensor> row_blocks;
  row_blocks.reserve(train_records.size());
  for (const corpus::SceneRecord* rec : train_records) {
    layout_data.push_back(layout_example_from_record(*rec, layout_cfg.lambda_dim));
    row_blocks.push_back(layout_data.back().rows);
  }
  auto norm = diffusion::LayoutNormStats::fit(row_blocks);

  Rng layout_init(Rng::mix(seed + 3));
  nn::SceneTransformer layout_model(layout_cfg, layout_init);
  Rng layout_rng(Rng::mix(seed + 4));
  report.final_layout_loss = diffusion::train_layout_model(
      layout_model, layout_data, norm, profile.layout_train, layout_rng,
      [&](int step, double loss) {
        say("layout step " + std::to_string(step) + " loss " + std::to_string(loss));
      });

  {
    JsonWriter extra;
    extra.begin_object();
    extra.key("scene_type");
    extra.value(corpus.scene_type);
    extra.key("norm");
    extra.raw(norm.to_json());
    extra.end_object();
    nn::CheckpointMeta meta{"layout_denoiser", layout_cfg, extra.str()};
    report.layout_checkpoint = out_dir / kLayoutCheckpointFile;
    nn::save_checkpoint(report.layout_checkpoint, meta, layout_model.params());
  }
  say("artifacts written to " + out_dir.string());
  return report;
}

// ---------------------------------------------------------------------------
// context loading

PipelineContext load_pipeline(const std::filesystem::path& dir) {
  for (const char* name :
       {kGraphCheckpointFile, kLayoutCheckpointFile, kCatalogFile, kCodebookFile})
    if (!std::filesystem::exists(dir / name))
      throw UntrainedModelError("no trained pipeline at " + dir.string() +
                                " (missing " + name + ")");

  PipelineContext ctx;
  Rng scratch(0);

  auto graph_meta = nn::read_checkpoint_meta(dir / kGraphCheckpointFile);
  if (graph_meta.kind != "graph_denoiser")
    throw Error(std::string(kGraphCheckpointFile) + " holds a '" + graph_meta.kind +
                "' model, expected graph_denoiser");
  ctx.graph_model =
      std::make_unique<nn::SceneTransformer>(graph_meta.config, scratch);
  nn::load_checkpoint(dir / kGraphCheckpointFile, ctx.graph_model->params());

  auto layout_meta = nn::read_checkpoint_meta(dir / kLayoutCheckpointFile);
  if (layout_meta.kind != "layout_denoiser")
    throw Error(std::string(kLayoutCheckpointFile) + " holds a '" + layout_meta.kind +
                "' model, expected layout_denoiser");
  ctx.layout_model =
      std::make_unique<nn::SceneTransformer>(layout_meta.config, scratch);
  nn::load_checkpoint(dir / kLayoutCheckpointFile, ctx.layout_model->params());

  auto graph_extra = nlohmann::json::parse(graph_meta.extra_json, nullptr, false);
  auto layout_extra = nlohmann::json::parse(layout_meta.extra_json, nullptr, false);
  if (graph_extra.is_discarded() || layout_extra.is_discarded())
    throw Error("checkpoint metadata under " + dir.string() + " is not valid JSON");

  ctx.scene_type = graph_extra.value("scene_type", std::string{});
  std::string layout_scene_type = layout_extra.value("scene_type", std::string{});
  if (ctx.scene_type.empty() || ctx.scene_type != layout_scene_type)
    throw Error("checkpoints under " + dir.string() +
                " disagree on the scene type ('" + ctx.scene_type + "' vs '" +
                layout_scene_type + "')");

  auto registry = SceneTypeRegistry::with_builtins();
  ctx.spec = registry.get(ctx.scene_type);
  ctx.lexicon = prompt::PhraseLexicon::builtin();
  ctx.actions = prompt::ActionRuleTable::builtin();
  ctx.groups = builtin_functional_groups();
  ctx.poses = assembly::PoseLibrary::builtin();

  ctx.catalog = assembly::catalog_from_json(slurp_file(dir / kCatalogFile),
                                            (dir / kCatalogFile).string());
  ctx.codebook = assembly::FeatureCodebook::from_json(
      slurp_file(dir / kCodebookFile), (dir / kCodebookFile).string());

  if (graph_extra.contains("size_histogram"))
    ctx.size_histogram = graph_extra["size_histogram"].get<std::vector<int>>();
  if (!layout_extra.contains("norm"))
    throw Error(std::string(kLayoutCheckpointFile) +
                " is missing its normalization statistics");
  ctx.norm = diffusion::LayoutNormStats::from_json(layout_extra["norm"].dump());

  ctx.mask_schedule.T = graph_meta.config.timesteps;
  ctx.layout_schedule = diffusion::LayoutSchedule::make(layout_meta.config.timesteps);
  return ctx;
}

// ---------------------------------------------------------------------------
// synthesis

const char* to_string(SynthesisMode m) {
  switch (m) {
    case SynthesisMode::Full: return "full";
    case SynthesisMode::Stylize: return "stylize";
    case SynthesisMode::Rearrange: return "rearrange";
    case SynthesisMode::Complete: return "complete";
    case SynthesisMode::Uncond: return "uncond";
  }
  return "full";
}

std::optional<SynthesisMode> synthesis_mode_from_string(const std::string& name) {
  if (name == "full") return SynthesisMode::Full;
  if (name == "stylize") return SynthesisMode::Stylize;
  if (name == "rearrange") return SynthesisMode::Rearrange;
  if (name == "complete") return SynthesisMode::Complete;
  if (name == "uncond") return SynthesisMode::Uncond;
  return std::nullopt;
}

namespace {

// node count for a fresh scene: the trained histogram restricted to at_least
// and above; an empty histogram falls back to the scene type's minimum
int draw_node_count(const PipelineContext& ctx, int at_least, Rng& rng) {
  at_least = std::max(at_least, 1);
  long total = 0;
  for (size_t n = static_cast<size_t>(at_least); n < ctx.size_histogram.size(); ++n)
    total += ctx.size_histogram[n];
  if (total == 0)
    return std::clamp(std::max(at_least, ctx.spec.min_objects), 1,
                      std::max(ctx.spec.max_objects, at_least));
  auto pick = static_cast<long>(rng.uniform_int(0, total - 1));
  for (size_t n = static_cast<size_t>(at_least); n < ctx.size_histogram.size(); ++n) {
    pick -= ctx.size_histogram[n];
    if (pick < 0) return static_cast<int>(n);
  }
  return ctx.spec.min_objects;
}

int resolve_node_count(const PipelineContext& ctx, const SynthesisRequest& req,
                       int anchor_count, Rng& rng) {
  if (req.object_count > 0) {
    if (req.object_count < anchor_count)
      throw AnchorsExceedNodeBudget(
          "prompt mentions " + std::to_string(anchor_count) +
          " objects but only " + std::to_string(req.object_count) +
          " were requested");
    if (req.object_count > ctx.spec.max_objects)
      throw ConfigError("object count " + std::to_string(req.object_count) +
                        " exceeds the " + ctx.scene_type + " limit of " +
                        std::to_string(ctx.spec.max_objects));
    return req.object_count;
  }
  if (anchor_count > ctx.spec.max_objects)
    throw AnchorsExceedNodeBudget("prompt mentions " + std::to_string(anchor_count) +
                                  " objects but " + ctx.scene_type + " holds at most " +
                                  std::to_string(ctx.spec.max_objects));
  return draw_node_count(ctx, anchor_count, rng);
}

// the first adjective that names a known style picks the feature anchor
std::optional<int> style_feature_anchor(const PipelineContext& ctx,
                                        const std::string& category,
                                        const std::vector<std::string>& adjectives) {
  const auto& styles = ctx.lexicon.style_adjectives();
  for (const std::string& adj : adjectives) {
    if (std::find(styles.begin(), styles.end(), adj) == styles.end()) continue;
    return assembly::quantize_feature(
        assembly::category_style_feature(category, adj, ctx.codebook.dim),
        ctx.codebook);
  }
  return std::nullopt;
}

void anchor_existing_graph(diffusion::GraphTemplate& templ,
                           const nn::GraphTokens& tokens, bool anchor_features,
                           bool anchor_relations) {
  const int n0 = tokens.n;
  for (int i = 0; i < n0; ++i) {
    templ.categories[static_cast<size_t>(i)] = tokens.categories[static_cast<size_t>(i)];
    templ.actions[static_cast<size_t>(i)] = tokens.actions[static_cast<size_t>(i)];
    if (anchor_features)
      templ.features[static_cast<size_t>(i)] = tokens.features[static_cast<size_t>(i)];
  }
  if (!anchor_relations) return;
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n0; ++j)
      if (i != j)
        templ.relations[static_cast<size_t>(i) * templ.n + static_cast<size_t>(j)] =
            tokens.relations[static_cast<size_t>(i * n0 + j)];
}

// raw denoiser output can carry degenerate sizes early in training; clamp so
// downstream geometry stays well-formed
void sanitize_layouts(std::vector<Layout>& layouts) {
  for (Layout& l : layouts) {
    for (int d = 0; d < 3; ++d) l.s[d] = std::max(l.s[d], 0.01);
    l.renormalize_rotation();
  }
}

const Scene& require_input_scene(const PipelineContext& ctx,
                                 const SynthesisRequest& req) {
  if (req.input_scene == nullptr)
    throw ConfigError(std::string(to_string(req.mode)) +
                      " mode needs an input scene");
  if (req.input_scene->objects.empty())
    throw ConfigError("the input scene has no objects");
  if (req.input_scene->scene_type != ctx.scene_type)
    throw ConfigError("the input scene is a '" + req.input_scene->scene_type +
                      "' but the models were trained on '" + ctx.scene_type + "'");
  return *req.input_scene;
}

}  // namespace

SynthesisResult synthesize(PipelineContext& ctx, const SynthesisRequest& req) {
  if (!ctx.graph_model || !ctx.layout_model)
    throw UntrainedModelError("synthesis needs both denoisers loaded");
  if (req.max_passes < 1) throw ConfigError("refinement needs at least one pass");

  SynthesisResult result;
  Rng count_rng(Rng::mix(req.seed + 11));
  Rng graph_rng(Rng::mix(req.seed + 22));
  Rng layout_rng(Rng::mix(req.seed + 33));

  // ----- parse + embed -----
  prompt::ParseResult parsed;
  std::vector<double> lambda;
  if (req.mode == SynthesisMode::Uncond) {
    if (!req.prompt.empty())
      result.warnings.push_back("unconditional mode ignores the prompt");
  } else {
    parsed = prompt::parse_prompt(req.prompt, ctx.spec.vocab, ctx.lexicon);
    for (const std::string& w : parsed.warnings) result.warnings.push_back(w);
    result.triplets = parsed.triplets;
    lambda = prompt::embed_prompt(req.prompt, ctx.graph_model->config().lambda_dim);
  }

  // ----- build the graph template and sample tokens -----
  nn::GraphTokens graph;
  std::vector<Layout> layouts;
  bool sample_layout = true;
  const nn::Tensor* frozen_rows_ptr = nullptr;
  std::vector<bool> frozen_flags;
  nn::Tensor frozen_rows;

  switch (req.mode) {
    case SynthesisMode::Full:
    case SynthesisMode::Uncond: {
      const auto& anchors = parsed.graph.nodes;
      int n = resolve_node_count(ctx, req, static_cast<int>(anchors.size()),
                                 count_rng);
      auto templ = diffusion::GraphTemplate::free_graph(n);
      for (size_t k = 0; k < anchors.size(); ++k) {
        int cat = anchors[k].category;
        templ.categories[k] = cat;
        const std::string& name = ctx.spec.vocab.name(cat);
        templ.actions[k] = static_cast<int>(ctx.actions.primary(ctx.scene_type, name));
        if (auto code = style_feature_anchor(ctx, name, anchors[k].adjectives))
          templ.features[k] = *code;
      }
      for (const prompt::AnchorEdge& e : parsed.graph.edges) {
        templ.relations[static_cast<size_t>(e.i) * n + static_cast<size_t>(e.j)] =
            static_cast<int>(e.predicate);
        templ.relations[static_cast<size_t>(e.j) * n + static_cast<size_t>(e.i)] =
            static_cast<int>(inverse_predicate(e.predicate));
      }
      nn::EmaGuard guard(ctx.graph_model->params());
      graph = diffusion::sample_graph(*ctx.graph_model, templ, lambda,
                                      ctx.mask_schedule, graph_rng);
      break;
    }
    case SynthesisMode::Stylize: {
      const Scene& input = require_input_scene(ctx, req);
      auto tokens = graph_tokens_from_scene(input, ctx.spec.vocab);
      auto templ = diffusion::GraphTemplate::free_graph(tokens.n);
      anchor_existing_graph(templ, tokens, /*anchor_features=*/false,
                            /*anchor_relations=*/true);
      nn::EmaGuard guard(ctx.graph_model->params());
      graph = diffusion::sample_graph(*ctx.graph_model, templ, lambda,
                                      ctx.mask_schedule, graph_rng);
      // appearance changes; geometry is carried over untouched
      sample_layout = false;
      layouts.reserve(input.objects.size());
      for (const SceneObject& obj : input.objects) layouts.push_back(obj.layout);
      break;
    }
    case SynthesisMode::Rearrange: {
      const Scene& input = require_input_scene(ctx, req);
      auto tokens = graph_tokens_from_scene(input, ctx.spec.vocab);
      auto templ = diffusion::GraphTemplate::free_graph(tokens.n);
      anchor_existing_graph(templ, tokens, /*anchor_features=*/true,
                            /*anchor_relations=*/false);
      nn::EmaGuard guard(ctx.graph_model->params());
      graph = diffusion::sample_graph(*ctx.graph_model, templ, lambda,
                                      ctx.mask_schedule, graph_rng);
      break;
    }
    case SynthesisMode::Complete: {
      const Scene& input = require_input_scene(ctx, req);
      if (req.add_objects < 1)
        throw ConfigError("completion needs at least one object to add");
      auto tokens = graph_tokens_from_scene(input, ctx.spec.vocab);
      int n = tokens.n + req.add_objects;
      if (n > ctx.spec.max_objects)
        throw AnchorsExceedNodeBudget(
            "completion would reach " + std::to_string(n) + " objects but " +
            ctx.scene_type + " holds at most " +
            std::to_string(ctx.spec.max_objects));
      auto templ = diffusion::GraphTemplate::free_graph(n);
      anchor_existing_graph(templ, tokens, /*anchor_features=*/true,
                            /*anchor_relations=*/true);
      {
        nn::EmaGuard guard(ctx.graph_model->params());
        graph = diffusion::sample_graph(*ctx.graph_model, templ, lambda,
                                        ctx.mask_schedule, graph_rng);
      }
      // existing rows are pinned; the sampler reproduces them bit for bit
      std::vector<Layout> existing;
      existing.reserve(input.objects.size());
      for (const SceneObject& obj : input.objects) existing.push_back(obj.layout);
      nn::Tensor existing_rows = diffusion::layouts_to_rows(existing);
      frozen_rows = nn::Tensor(n, diffusion::kLayoutChannels);
      frozen_flags.assign(static_cast<size_t>(n), false);
      for (int r = 0; r < existing_rows.rows; ++r) {
        frozen_flags[static_cast<size_t>(r)] = true;
        for (int c = 0; c < diffusion::kLayoutChannels; ++c)
          frozen_rows.at(r, c) = existing_rows.at(r, c);
      }
      frozen_rows_ptr = &frozen_rows;
      break;
    }
  }

  // ----- sample layouts -----
  if (sample_layout) {
    nn::EmaGuard guard(ctx.layout_model->params());
    nn::Tensor rows = diffusion::sample_layout_rows(
        *ctx.layout_model, graph, lambda, ctx.norm, ctx.layout_schedule, layout_rng,
        frozen_rows_ptr, frozen_rows_ptr ? &frozen_flags : nullptr);
    layouts = diffusion::rows_to_layouts(rows);
    sanitize_layouts(layouts);
  }

  // ----- assemble assets and humans -----
  Scene scene = assembly::assemble_scene(graph, layouts, ctx.spec.vocab, ctx.catalog,
                                         ctx.codebook, ctx.poses, ctx.retrieval_top_k,
                                         &result.warnings);
  scene.scene_type = ctx.scene_type;
  scene.prompt = req.prompt;
  scene.seed = req.seed;

  // ----- human-aware refinement -----
  if (!req.skip_optimize) {
    auto refined = refine_scene(scene, ctx.groups, req.optimizer, req.max_passes);
    scene = std::move(refined.scene);
  }

  result.scene = std::move(scene);
  result.graph = std::move(graph);
  return result;
}

}  // namespace roomforge
